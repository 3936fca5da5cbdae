//! The grid game: exact best responses, exploitability and fictitious play.

mod envelope;
mod fictitious;

pub use envelope::{best_response, upper_envelope, BestResponse};
pub use fictitious::{fictitious_play, Checkpoint, FictitiousPlayConfig, SolveReport};

use serde::{Deserialize, Serialize};

use crate::error::{LottoError, Result};
use crate::model::{BidGrid, DiscreteStrategy, EquilibriumProfile, Strategy};
use crate::utility::utility_curve;

/// Per-player breakdown of an exploitability measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exploitability {
    /// `max_i gains[i]`, clamped at zero.
    pub value: f64,
    /// Best-response value minus current utility, per player.
    pub gains: Vec<f64>,
    pub utilities: Vec<f64>,
    pub best_response_values: Vec<f64>,
}

/// Exploitability of grid strategies; `budgets[i]` constrains player `i`'s deviation.
pub fn grid_exploitability(strategies: &[DiscreteStrategy], budgets: &[f64]) -> Result<Exploitability> {
    if strategies.len() != budgets.len() || strategies.len() < 2 {
        return Err(LottoError::Invalid("one strategy per budget and at least two players required".into()));
    }
    let grid = *strategies[0].grid();
    if strategies.iter().any(|s| *s.grid() != grid) {
        return Err(LottoError::Domain("strategies live on different grids".into()));
    }
    let wrapped: Vec<Strategy> = strategies.iter().cloned().map(Strategy::Grid).collect();
    let mut out = Exploitability { value: 0.0, gains: vec![], utilities: vec![], best_response_values: vec![] };
    for (i, s) in strategies.iter().enumerate() {
        let opponents: Vec<&Strategy> = wrapped.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s).collect();
        let curve = utility_curve(&grid, &opponents)?;
        let current: f64 = s.probs().iter().zip(&curve).map(|(p, u)| p * u).sum();
        let br = best_response(&curve, budgets[i], &grid)?;
        out.gains.push(br.value - current);
        out.utilities.push(current);
        out.best_response_values.push(br.value);
    }
    out.value = out.gains.iter().copied().fold(0.0, f64::max);
    Ok(out)
}

/// Exploitability of `profile` after projecting every strategy onto `grid`.
pub fn exploitability(profile: &EquilibriumProfile, grid: &BidGrid) -> Result<f64> {
    Ok(exploitability_detail(profile, grid)?.value)
}

pub fn exploitability_detail(profile: &EquilibriumProfile, grid: &BidGrid) -> Result<Exploitability> {
    let projected = profile
        .strategies()
        .iter()
        .map(|s| s.discretize(grid))
        .collect::<Result<Vec<_>>>()?;
    grid_exploitability(&projected, profile.game().budgets())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{solve_degenerate_threshold, solve_two_player};
    use crate::model::{GameSpec, Regime};

    #[test]
    fn degenerate_profile_is_exact() {
        let game = GameSpec::new(vec![4.0, 1.0, 1.0], Some(2.0)).unwrap();
        let p = solve_degenerate_threshold(&game).unwrap();
        for k in [1, 2, 7, 100] {
            assert_eq!(exploitability(&p, &BidGrid::new(k, 2.0).unwrap()).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_bid_against_zero_bid() {
        let game = GameSpec::new(vec![1.0, 1.0], Some(2.0)).unwrap();
        let grid = BidGrid::new(2, 2.0).unwrap();
        let zero = DiscreteStrategy::pure(grid, 0).unwrap();
        let p = EquilibriumProfile::new(
            game,
            vec![zero.clone().into(), zero.into()],
            Regime::GridSolved,
            None,
        )
        .unwrap();
        assert!((exploitability(&p, &grid).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn low_budget_closed_form_is_nearly_exact() {
        let game = GameSpec::new(vec![1.0, 0.5], Some(3.0)).unwrap();
        let p = solve_two_player(&game).unwrap().into_profile().unwrap();
        let e = exploitability(&p, &BidGrid::new(10_000, 3.0).unwrap()).unwrap();
        assert!(e <= 1e-3, "{e}");
    }
}
