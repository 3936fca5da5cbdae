//! Games, bid grids and the two strategy representations.

mod cdf;
mod discrete;
mod game;
mod profile;
mod strategy;

pub use cdf::{Atom, PiecewiseCdf, Segment, MASS_TOL};
pub use discrete::{DiscreteStrategy, BUDGET_TOL};
pub use game::{BidGrid, GameSpec};
pub use profile::{Affine, EquilibriumProfile, Regime};
pub use strategy::Strategy;
