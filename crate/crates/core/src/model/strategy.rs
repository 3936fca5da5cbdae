use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cdf::{Atom, PiecewiseCdf, Segment};
use super::discrete::DiscreteStrategy;
use super::game::BidGrid;
use crate::error::Result;

/// Either representation of a mixed bid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Continuous(PiecewiseCdf),
    Grid(DiscreteStrategy),
}

impl From<PiecewiseCdf> for Strategy {
    fn from(c: PiecewiseCdf) -> Self {
        Strategy::Continuous(c)
    }
}

impl From<DiscreteStrategy> for Strategy {
    fn from(d: DiscreteStrategy) -> Self {
        Strategy::Grid(d)
    }
}

impl Strategy {
    pub fn cdf(&self, x: f64) -> Result<(f64, f64)> {
        match self {
            Strategy::Continuous(c) => c.cdf(x),
            Strategy::Grid(d) => d.cdf(x),
        }
    }

    /// `(P[X < x], P[X = x])`.
    pub fn split(&self, x: f64) -> (f64, f64) {
        match self {
            Strategy::Continuous(c) => c.split(x),
            Strategy::Grid(d) => d.split(x),
        }
    }

    pub fn expectation(&self) -> f64 {
        match self {
            Strategy::Continuous(c) => c.expectation(),
            Strategy::Grid(d) => d.expectation(),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Strategy::Continuous(c) => c.quantile(u),
            Strategy::Grid(d) => d.quantile(u),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Strategy::Continuous(c) => c.sample(rng),
            Strategy::Grid(d) => d.sample(rng),
        }
    }

    pub fn grid(&self) -> Option<&BidGrid> {
        match self {
            Strategy::Continuous(_) => None,
            Strategy::Grid(d) => Some(d.grid()),
        }
    }

    /// Point masses. Every positive grid probability counts as an atom.
    pub fn atoms(&self) -> Vec<Atom> {
        match self {
            Strategy::Continuous(c) => c.atoms().to_vec(),
            Strategy::Grid(d) => d
                .probs()
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(l, p)| Atom { at: d.grid().point(l), mass: *p })
                .collect(),
        }
    }

    pub fn segments(&self) -> &[Segment] {
        match self {
            Strategy::Continuous(c) => c.segments(),
            Strategy::Grid(_) => &[],
        }
    }

    /// Locations where the cdf jumps or changes slope.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Strategy::Continuous(c) => c.breakpoints().collect(),
            Strategy::Grid(_) => self.atoms().iter().map(|a| a.at).collect(),
        }
    }

    pub fn density_right_of(&self, x: f64) -> f64 {
        match self {
            Strategy::Continuous(c) => c.density_right_of(x),
            Strategy::Grid(_) => 0.0,
        }
    }

    /// Largest point carrying probability.
    pub fn support_max(&self) -> f64 {
        match self {
            Strategy::Continuous(c) => c.support_max(),
            Strategy::Grid(d) => d
                .probs()
                .iter()
                .rposition(|p| *p > 0.0)
                .map_or(0.0, |l| d.grid().point(l)),
        }
    }

    pub fn discretize(&self, grid: &BidGrid) -> Result<DiscreteStrategy> {
        match self {
            Strategy::Continuous(c) => c.discretize(grid),
            Strategy::Grid(d) if d.grid() == grid => Ok(d.clone()),
            Strategy::Grid(_) => PiecewiseCdf::new(self.atoms(), vec![])?.discretize(grid),
        }
    }

    /// The same distribution expressed as atoms plus segments.
    pub fn to_piecewise(&self) -> Result<PiecewiseCdf> {
        match self {
            Strategy::Continuous(c) => Ok(c.clone()),
            Strategy::Grid(_) => PiecewiseCdf::new(self.atoms(), vec![]),
        }
    }
}
