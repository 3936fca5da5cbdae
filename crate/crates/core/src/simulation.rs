//! Seeded Monte Carlo play of a profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LottoError, Result};
use crate::model::EquilibriumProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub samples: u64,
    pub seed: u64,
    pub win_shares: Vec<f64>,
    pub win_share_se: Vec<f64>,
    pub mean_bids: Vec<f64>,
    pub mean_bid_se: Vec<f64>,
}

/// Plays `samples` independent rounds. Each round every player draws a bid
/// from its strategy and the battlefield goes to a uniformly chosen highest
/// bidder.
pub fn simulate(profile: &EquilibriumProfile, samples: u64, seed: u64) -> Result<SimulationResult> {
    if samples == 0 {
        return Err(LottoError::Invalid("at least one sample is required".into()));
    }
    let n = profile.game().n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = vec![0u64; n];
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut bids = vec![0.0; n];
    let mut leaders = Vec::with_capacity(n);

    for _ in 0..samples {
        for (b, s) in bids.iter_mut().zip(profile.strategies()) {
            *b = s.sample(&mut rng);
        }
        let top = bids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        leaders.clear();
        leaders.extend((0..n).filter(|&i| bids[i] == top));
        let winner = if leaders.len() == 1 { leaders[0] } else { leaders[rng.gen_range(0..leaders.len())] };
        wins[winner] += 1;
        for i in 0..n {
            sum[i] += bids[i];
            sum_sq[i] += bids[i] * bids[i];
        }
    }

    let m = samples as f64;
    let win_shares: Vec<f64> = wins.iter().map(|&w| w as f64 / m).collect();
    let win_share_se = win_shares.iter().map(|p| (p * (1.0 - p) / m).sqrt()).collect();
    let mean_bids: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let mean_bid_se = mean_bids
        .iter()
        .zip(&sum_sq)
        .map(|(mean, sq)| {
            let var = if samples > 1 { ((sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
            (var / m).sqrt()
        })
        .collect();
    Ok(SimulationResult { samples, seed, win_shares, win_share_se, mean_bids, mean_bid_se })
}
