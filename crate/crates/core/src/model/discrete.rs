use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cdf::MASS_TOL;
use super::game::BidGrid;
use crate::error::{LottoError, Result};

/// Budget-feasibility slack for expected bids.
pub const BUDGET_TOL: f64 = 1e-9;

/// A mixed strategy over the points of a [`BidGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiscrete", into = "RawDiscrete")]
pub struct DiscreteStrategy {
    grid: BidGrid,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDiscrete {
    grid: BidGrid,
    probs: Vec<f64>,
}

impl TryFrom<RawDiscrete> for DiscreteStrategy {
    type Error = LottoError;

    fn try_from(raw: RawDiscrete) -> Result<Self> {
        DiscreteStrategy::new(raw.grid, raw.probs)
    }
}

impl From<DiscreteStrategy> for RawDiscrete {
    fn from(s: DiscreteStrategy) -> Self {
        RawDiscrete { grid: s.grid, probs: s.probs }
    }
}

impl DiscreteStrategy {
    pub fn new(grid: BidGrid, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != grid.len() {
            return Err(LottoError::Invalid(format!(
                "expected {} probabilities, got {}",
                grid.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(LottoError::Invalid(format!("probabilities must be finite and >= 0, got {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(LottoError::Invalid(format!("probabilities must sum to 1, got {total}")));
        }
        Ok(Self { grid, probs })
    }

    /// All mass on grid point `l`.
    pub fn pure(grid: BidGrid, l: usize) -> Result<Self> {
        let mut probs = vec![0.0; grid.len()];
        *probs
            .get_mut(l)
            .ok_or_else(|| LottoError::Invalid(format!("grid index {l} out of range")))? = 1.0;
        Self::new(grid, probs)
    }

    /// Rescales probabilities that drifted through repeated averaging.
    pub(crate) fn from_unnormalized(grid: BidGrid, mut probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(LottoError::Internal(format!("cannot normalize probability vector with total {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(grid, probs)
    }

    pub fn grid(&self) -> &BidGrid {
        &self.grid
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn expectation(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(l, p)| p * self.grid.point(l))
            .sum()
    }

    pub fn is_feasible(&self, budget: f64) -> bool {
        self.expectation() <= budget + BUDGET_TOL
    }

    /// `(P[X < x], P[X = x])`.
    pub fn split(&self, x: f64) -> (f64, f64) {
        let mut below = 0.0;
        let mut equal = 0.0;
        let at = self.grid.index_of(x);
        for (l, p) in self.probs.iter().enumerate() {
            if Some(l) == at {
                equal = *p;
            } else if self.grid.point(l) < x {
                below += p;
            } else {
                break;
            }
        }
        (below.min(1.0), equal)
    }

    pub fn cdf(&self, x: f64) -> Result<(f64, f64)> {
        if x.is_nan() || x < 0.0 {
            return Err(LottoError::Domain(format!("cdf evaluated at negative bid {x}")));
        }
        let (below, equal) = self.split(x);
        Ok(((below + equal).min(1.0), below))
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let mut cum = 0.0;
        let mut last = 0;
        for (l, p) in self.probs.iter().enumerate() {
            if *p > 0.0 {
                cum += p;
                last = l;
                if u < cum {
                    return self.grid.point(l);
                }
            }
        }
        self.grid.point(last)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}
