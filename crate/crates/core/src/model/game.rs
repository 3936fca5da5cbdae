use serde::{Deserialize, Serialize};

use crate::error::{LottoError, Result};

/// A single-battlefield General Lotto game with `n` players.
///
/// The battlefield is worth 1 to every player. Budgets cap the *expected*
/// bid of each player. An optional threshold caps every realized bid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame", into = "RawGame")]
pub struct GameSpec {
    budgets: Vec<f64>,
    threshold: Option<f64>,
    descending: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawGame {
    budgets: Vec<f64>,
    #[serde(default)]
    threshold: Option<f64>,
}

impl TryFrom<RawGame> for GameSpec {
    type Error = LottoError;

    fn try_from(raw: RawGame) -> Result<Self> {
        GameSpec::new(raw.budgets, raw.threshold)
    }
}

impl From<GameSpec> for RawGame {
    fn from(game: GameSpec) -> Self {
        RawGame { budgets: game.budgets, threshold: game.threshold }
    }
}

impl GameSpec {
    pub fn new(budgets: Vec<f64>, threshold: Option<f64>) -> Result<Self> {
        if budgets.len() < 2 {
            return Err(LottoError::Invalid(format!(
                "a game needs at least two players, got {}",
                budgets.len()
            )));
        }
        if let Some(b) = budgets.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(LottoError::Invalid(format!("budgets must be positive and finite, got {b}")));
        }
        if let Some(t) = threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(LottoError::Invalid(format!("threshold must be positive and finite, got {t}")));
            }
        }
        let mut descending: Vec<usize> = (0..budgets.len()).collect();
        // stable sort keeps equal budgets in caller order
        descending.sort_by(|&a, &b| budgets[b].total_cmp(&budgets[a]));
        Ok(Self { budgets, threshold, descending })
    }

    pub fn n(&self) -> usize {
        self.budgets.len()
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn budget(&self, player: usize) -> f64 {
        self.budgets[player]
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn max_budget(&self) -> f64 {
        self.budgets[self.descending[0]]
    }

    /// Player indices ordered by budget, largest first. Ties keep input order.
    pub fn descending_order(&self) -> &[usize] {
        &self.descending
    }

    /// Bound on equilibrium bids of the threshold-free game: `2^(2n+1) * max B`.
    pub fn bid_bound(&self) -> f64 {
        2f64.powi(2 * self.n() as i32 + 1) * self.max_budget()
    }

    /// The cap used for computation: the threshold if present, otherwise the
    /// threshold-free bid bound (which is non-binding at equilibrium).
    pub fn effective_cap(&self) -> f64 {
        self.threshold.unwrap_or_else(|| self.bid_bound())
    }

    /// True when some player can afford to bid the threshold with certainty.
    pub fn threshold_binds(&self) -> bool {
        matches!(self.threshold, Some(t) if t <= self.max_budget())
    }
}

/// The uniform bid grid `{ l * cap / k : 0 <= l <= k }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidGrid {
    k: usize,
    cap: f64,
}

impl BidGrid {
    pub fn new(k: usize, cap: f64) -> Result<Self> {
        if k == 0 {
            return Err(LottoError::Invalid("grid resolution k must be at least 1".into()));
        }
        if !(cap.is_finite() && cap > 0.0) {
            return Err(LottoError::Invalid(format!("grid cap must be positive and finite, got {cap}")));
        }
        Ok(Self { k, cap })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.k + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.cap / self.k as f64
    }

    /// The `l`-th grid point. The last point is exactly `cap`.
    pub fn point(&self, l: usize) -> f64 {
        debug_assert!(l <= self.k);
        if l == self.k {
            self.cap
        } else {
            self.cap * l as f64 / self.k as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.k).map(|l| self.point(l)).collect()
    }

    /// Index of the grid point nearest to `x`, ties resolved to the lower point.
    /// Values outside `[0, cap]` clamp to the end points.
    pub fn nearest_index(&self, x: f64) -> usize {
        if x <= 0.0 {
            return 0;
        }
        if x >= self.cap {
            return self.k;
        }
        let pos = x / self.spacing();
        let lo = pos.floor() as usize;
        let lo = lo.min(self.k);
        if lo == self.k {
            return lo;
        }
        let mid = 0.5 * (self.point(lo) + self.point(lo + 1));
        if x <= mid {
            lo
        } else {
            lo + 1
        }
    }

    /// Index of `x` if it coincides with a grid point (up to roundoff).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        if x < -self.spacing() * 1e-9 || x > self.cap * (1.0 + 1e-12) {
            return None;
        }
        let l = self.nearest_index(x);
        ((self.point(l) - x).abs() <= self.spacing() * 1e-9).then_some(l)
    }

    /// Midpoint between grid points `l - 1` and `l`; `l` ranges over `1..=k`.
    pub(crate) fn lower_midpoint(&self, l: usize) -> f64 {
        0.5 * (self.point(l - 1) + self.point(l))
    }
}
