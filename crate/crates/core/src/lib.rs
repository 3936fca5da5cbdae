//! Equilibrium computation and verification for multiplayer General Lotto
//! games on a single battlefield.
//!
//! - [`model`]: games, bid grids, piecewise-linear cdfs and grid strategies
//! - [`utility`]: exact winning probabilities with uniform tie-breaking
//! - [`closed_form`]: exact two-player and degenerate-threshold equilibria
//! - [`solver`]: grid best responses, exploitability and fictitious play
//! - [`verify`]: structural and ε-Nash diagnostics for candidate profiles
//! - [`simulation`]: seeded Monte Carlo play
//! - [`io`]: config, profile and strategy file formats

pub mod closed_form;
pub mod error;
pub mod io;
pub mod model;
pub mod simulation;
pub mod solver;
pub mod utility;
pub mod verify;

pub use error::{LottoError, Result};
pub use model::{
    Affine, Atom, BidGrid, DiscreteStrategy, EquilibriumProfile, GameSpec, PiecewiseCdf, Regime, Segment, Strategy,
};
