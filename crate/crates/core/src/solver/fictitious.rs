use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::envelope::{best_response, BestResponse};
use super::grid_exploitability;
use crate::error::{LottoError, Result};
use crate::model::{BidGrid, DiscreteStrategy, EquilibriumProfile, GameSpec, Regime, Strategy};
use crate::utility::tie_share;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FictitiousPlayConfig {
    pub max_iters: usize,
    pub target_eps: f64,
    /// Exploitability is recorded in the trace every this many iterations.
    pub checkpoint_every: usize,
}

impl Default for FictitiousPlayConfig {
    fn default() -> Self {
        Self { max_iters: 20_000, target_eps: 1e-3, checkpoint_every: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub iteration: usize,
    /// Exploitability of the profile that would be returned at this point.
    pub exploitability: f64,
    /// Exploitability of the running average itself.
    pub average_exploitability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub profile: EquilibriumProfile,
    pub iterations: usize,
    pub exploitability: f64,
    pub converged: bool,
    pub expected_bids: Vec<f64>,
    /// `B_i - E[X_i]` per player.
    pub budget_slack: Vec<f64>,
    pub trace: Vec<Checkpoint>,
}

/// Approximates an equilibrium of the grid game by fictitious play.
///
/// Every player starts at a sure bid of 0. In each round all players
/// simultaneously best-respond to the frozen empirical averages of the others,
/// then each average moves toward its best response with step `1/(t+1)`. The
/// best responses of a round also certify the exploitability of the averages
/// they answer, so the stopping test costs nothing extra. The average with the
/// lowest exploitability seen so far is the one returned.
pub fn fictitious_play(game: &GameSpec, grid: &BidGrid, config: &FictitiousPlayConfig) -> Result<SolveReport> {
    check_grid(game, grid)?;
    if !(config.target_eps >= 0.0) {
        return Err(LottoError::Invalid(format!("target exploitability must be >= 0, got {}", config.target_eps)));
    }
    let n = game.n();
    let len = grid.len();
    let every = config.checkpoint_every.max(1);

    let mut avg: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut p = vec![0.0; len];
            p[0] = 1.0;
            p
        })
        .collect();
    let mut trace = Vec::new();
    let mut t = 0usize;
    let mut best = avg.clone();
    let mut best_eps = f64::INFINITY;
    let mut eps;

    loop {
        let tables: Vec<Vec<(f64, f64)>> = avg.iter().map(|p| split_table(p)).collect();
        let mut responses: Vec<BestResponse> = Vec::with_capacity(n);
        eps = 0.0f64;
        for (i, mine) in avg.iter().enumerate() {
            let curve: Vec<f64> = (0..len)
                .map(|l| tie_share(tables.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, tab)| tab[l])))
                .collect();
            let br = best_response(&curve, game.budget(i), grid)?;
            let current: f64 = mine.iter().zip(&curve).map(|(p, u)| p * u).sum();
            eps = eps.max(br.value - current);
            responses.push(br);
        }
        if eps < best_eps {
            best_eps = eps;
            best.clone_from(&avg);
        }
        if t.is_multiple_of(every) {
            trace.push(Checkpoint { iteration: t, exploitability: best_eps, average_exploitability: eps });
            debug!("fictitious play t={t} exploitability={eps:.3e} best={best_eps:.3e}");
        }
        if eps <= config.target_eps || t >= config.max_iters {
            break;
        }

        t += 1;
        let step = 1.0 / (t as f64 + 1.0);
        for (p, br) in avg.iter_mut().zip(&responses) {
            p.iter_mut().for_each(|v| *v *= 1.0 - step);
            for (l, w) in br.support.iter().zip(&br.weights) {
                p[*l] += step * w;
            }
        }
    }

    let strategies = best
        .into_iter()
        .map(|p| DiscreteStrategy::from_unnormalized(*grid, p))
        .collect::<Result<Vec<_>>>()?;
    let exact = grid_exploitability(&strategies, game.budgets())?;
    let expected_bids: Vec<f64> = strategies.iter().map(DiscreteStrategy::expectation).collect();
    let budget_slack = game.budgets().iter().zip(&expected_bids).map(|(b, e)| b - e).collect();
    if trace.last().map(|c| c.iteration) != Some(t) {
        trace.push(Checkpoint { iteration: t, exploitability: exact.value, average_exploitability: eps });
    }
    let converged = exact.value <= config.target_eps;
    info!(
        "fictitious play stopped after {t} iterations, exploitability {:.3e} ({})",
        exact.value,
        if converged { "converged" } else { "not converged" }
    );
    let profile = EquilibriumProfile::new(
        game.clone(),
        strategies.into_iter().map(Strategy::Grid).collect(),
        Regime::GridSolved,
        None,
    )?;
    Ok(SolveReport {
        profile,
        iterations: t,
        exploitability: exact.value,
        converged,
        expected_bids,
        budget_slack,
        trace,
    })
}

/// The grid must span the threshold, or reach the non-binding bid bound when
/// the game has none.
fn check_grid(game: &GameSpec, grid: &BidGrid) -> Result<()> {
    match game.threshold() {
        Some(t) if (grid.cap() - t).abs() > 1e-12 * t => Err(LottoError::Invalid(format!(
            "grid cap {} must equal the threshold {t}",
            grid.cap()
        ))),
        None if grid.cap() < game.bid_bound() * (1.0 - 1e-12) => Err(LottoError::Invalid(format!(
            "grid cap {} is below the threshold-free bid bound {}",
            grid.cap(),
            game.bid_bound()
        ))),
        _ => Ok(()),
    }
}

fn split_table(probs: &[f64]) -> Vec<(f64, f64)> {
    let mut below = 0.0;
    probs
        .iter()
        .map(|p| {
            let entry = (f64::min(below, 1.0), *p);
            below += p;
            entry
        })
        .collect()
}
