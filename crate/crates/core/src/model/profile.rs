use serde::{Deserialize, Serialize};

use super::game::GameSpec;
use super::strategy::Strategy;
use crate::error::{LottoError, Result};

/// How a profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Two players, `B1 <= T/2`: uniform supports on `[0, 2 B1]`.
    TwoPlayerLowBudget,
    /// Two players, `T/2 < B1 < T`: uniform pieces, plateaus and shared atoms at `T`.
    TwoPlayerMidBudget,
    /// Two players, `B1 >= T`.
    TwoPlayerHighBudget,
    /// Any `n` with `T <= max B`: atoms at `0` and `T` only.
    DegenerateThreshold,
    /// Approximate equilibrium of the grid game.
    GridSolved,
    /// Read from a strategy file that carries no solve metadata.
    Imported,
}

/// Slope and intercept of the line that a player's winning probability
/// follows on its support and dominates elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub slope: f64,
    pub intercept: f64,
}

impl Affine {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// One strategy per player plus solve metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct EquilibriumProfile {
    game: GameSpec,
    strategies: Vec<Strategy>,
    regime: Regime,
    support_sup: f64,
    affine: Option<Vec<Affine>>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    game: GameSpec,
    regime: Regime,
    support_sup: f64,
    #[serde(default)]
    affine: Option<Vec<Affine>>,
    strategies: Vec<Strategy>,
}

impl TryFrom<RawProfile> for EquilibriumProfile {
    type Error = LottoError;

    fn try_from(raw: RawProfile) -> Result<Self> {
        EquilibriumProfile::new(raw.game, raw.strategies, raw.regime, raw.affine)
    }
}

impl From<EquilibriumProfile> for RawProfile {
    fn from(p: EquilibriumProfile) -> Self {
        RawProfile {
            game: p.game,
            regime: p.regime,
            support_sup: p.support_sup,
            affine: p.affine,
            strategies: p.strategies,
        }
    }
}

impl EquilibriumProfile {
    /// Validates the profile; the common support supremum is derived from the strategies.
    pub fn new(game: GameSpec, strategies: Vec<Strategy>, regime: Regime, affine: Option<Vec<Affine>>) -> Result<Self> {
        if strategies.len() != game.n() {
            return Err(LottoError::Invalid(format!(
                "{} strategies for a {}-player game",
                strategies.len(),
                game.n()
            )));
        }
        if let Some(t) = game.threshold() {
            if let Some((i, s)) = strategies
                .iter()
                .enumerate()
                .find(|(_, s)| s.support_max() > t * (1.0 + 1e-12))
            {
                return Err(LottoError::Domain(format!(
                    "player {i} bids up to {} above the threshold {t}",
                    s.support_max()
                )));
            }
        }
        if let Some(coefs) = &affine {
            if coefs.len() != game.n() {
                return Err(LottoError::Invalid("one affine pair per player required".into()));
            }
            if coefs.iter().any(|c| !(c.slope > 0.0) || c.intercept < 0.0) {
                return Err(LottoError::Invalid("affine coefficients need a > 0 and b >= 0".into()));
            }
            if coefs.iter().filter(|c| c.intercept > 0.0).count() > 1 {
                return Err(LottoError::Invalid("at most one player may have a positive intercept".into()));
            }
        }
        let support_sup = strategies.iter().map(Strategy::support_max).fold(0.0, f64::max);
        Ok(Self { game, strategies, regime, support_sup, affine })
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &Strategy {
        &self.strategies[player]
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Supremum of the union of all supports.
    pub fn support_sup(&self) -> f64 {
        self.support_sup
    }

    pub fn affine(&self) -> Option<&[Affine]> {
        self.affine.as_deref()
    }

    /// Strategies of every player except `player`.
    pub fn opponents(&self, player: usize) -> Vec<&Strategy> {
        self.strategies
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, s)| s)
            .collect()
    }

    /// Replaces the game, e.g. when a profile file is verified against a
    /// separately supplied game description.
    pub fn with_game(self, game: GameSpec) -> Result<Self> {
        Self::new(game, self.strategies, self.regime, self.affine)
    }
}
