//! Winning probabilities and expected utilities under uniform tie-breaking.
//!
//! A bid `x` against independent opponents wins with probability
//! `E[ 1{x >= every opponent} / (1 + #opponents tying at x) ]`. The tie count
//! is handled exactly: each opponent contributes a factor
//! `P[X < x] + P[X = x] z` to a generating polynomial whose `z^m` coefficient is
//! the probability that exactly `m` opponents tie while the rest bid below.

use serde::{Deserialize, Serialize};

use crate::error::{LottoError, Result};
use crate::model::{BidGrid, EquilibriumProfile, Strategy};

/// An opponent's bid relative to a query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpponentSummary {
    pub below: f64,
    pub equal: f64,
    pub above: f64,
}

impl OpponentSummary {
    pub fn at(strategy: &Strategy, x: f64) -> Self {
        let (below, equal) = strategy.split(x);
        Self { below, equal, above: (1.0 - below - equal).max(0.0) }
    }
}

/// Tie-share probability from per-opponent `(P[X < x], P[X = x])` pairs.
pub fn tie_share<I>(splits: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut coefs: Vec<f64> = vec![1.0];
    for (below, equal) in splits {
        let mut next = vec![0.0; coefs.len() + 1];
        for (m, c) in coefs.iter().enumerate() {
            next[m] += c * below;
            next[m + 1] += c * equal;
        }
        coefs = next;
    }
    coefs.iter().enumerate().map(|(m, c)| c / (m + 1) as f64).sum()
}

/// Probability that a bid of `x` wins against `opponents`.
pub fn win_prob(x: f64, opponents: &[&Strategy]) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(LottoError::Domain(format!("negative bid {x}")));
    }
    if opponents.is_empty() {
        return Err(LottoError::Invalid("win probability needs at least one opponent".into()));
    }
    Ok(tie_share(opponents.iter().map(|s| s.split(x))))
}

/// Winning probability at every point of `grid`.
pub fn utility_curve(grid: &BidGrid, opponents: &[&Strategy]) -> Result<Vec<f64>> {
    if opponents.is_empty() {
        return Err(LottoError::Invalid("utility curve needs at least one opponent".into()));
    }
    let tables: Vec<Vec<(f64, f64)>> = opponents.iter().map(|s| split_table(grid, s)).collect();
    Ok((0..grid.len())
        .map(|l| tie_share(tables.iter().map(|t| t[l])))
        .collect())
}

/// `(below, equal)` of `strategy` at every grid point.
fn split_table(grid: &BidGrid, strategy: &Strategy) -> Vec<(f64, f64)> {
    match strategy {
        Strategy::Grid(d) if d.grid() == grid => {
            let mut below = 0.0;
            d.probs()
                .iter()
                .map(|p| {
                    let entry = (f64::min(below, 1.0), *p);
                    below += p;
                    entry
                })
                .collect()
        }
        _ => (0..grid.len()).map(|l| strategy.split(grid.point(l))).collect(),
    }
}

fn check_common_domain<'a>(strategies: impl Iterator<Item = &'a Strategy>) -> Result<()> {
    let mut seen: Option<&BidGrid> = None;
    for g in strategies.filter_map(Strategy::grid) {
        match seen {
            Some(prev) if prev != g => {
                return Err(LottoError::Domain(format!(
                    "strategies live on different grids (k={}, cap={}) vs (k={}, cap={})",
                    prev.k(),
                    prev.cap(),
                    g.k(),
                    g.cap()
                )))
            }
            _ => seen = Some(g),
        }
    }
    Ok(())
}

/// Expected utility of `me` against independent `opponents`.
///
/// Atoms are weighted by their exact tie-aware winning probability. On the
/// continuous part ties have probability zero, so the integrand is the product
/// of opponent cdfs, a polynomial on every interval free of breakpoints; each
/// such piece is integrated exactly.
pub fn expected_utility(me: &Strategy, opponents: &[&Strategy]) -> Result<f64> {
    if opponents.is_empty() {
        return Err(LottoError::Invalid("expected utility needs at least one opponent".into()));
    }
    check_common_domain(std::iter::once(me).chain(opponents.iter().copied()))?;

    if let Strategy::Grid(d) = me {
        let curve = utility_curve(d.grid(), opponents)?;
        return Ok(d.probs().iter().zip(&curve).map(|(p, u)| p * u).sum());
    }

    let mut total = 0.0;
    for a in me.atoms() {
        total += a.mass * win_prob(a.at, opponents)?;
    }

    let opp_breaks: Vec<f64> = opponents.iter().flat_map(|s| s.breakpoints()).collect();
    for seg in me.segments() {
        let mut cuts: Vec<f64> = opp_breaks
            .iter()
            .copied()
            .filter(|x| *x > seg.lo && *x < seg.hi)
            .collect();
        cuts.push(seg.lo);
        cuts.push(seg.hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            total += seg.density * integrate_cdf_product(w[0], w[1], opponents);
        }
    }
    Ok(total)
}

/// `∫_a^b ∏ F_j(y) dy` when no opponent has a breakpoint inside `(a, b)`.
fn integrate_cdf_product(a: f64, b: f64, opponents: &[&Strategy]) -> f64 {
    // polynomial in t = y - a
    let mut poly: Vec<f64> = vec![1.0];
    for s in opponents {
        let (below, equal) = s.split(a);
        let value = (below + equal).min(1.0);
        let slope = s.density_right_of(a);
        let mut next = vec![0.0; poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j] += c * value;
            next[j + 1] += c * slope;
        }
        poly = next;
    }
    let width = b - a;
    let mut pow = width;
    let mut sum = 0.0;
    for (j, c) in poly.iter().enumerate() {
        sum += c * pow / (j + 1) as f64;
        pow *= width;
    }
    sum
}

/// Expected utility of every player in `profile`.
pub fn profile_utilities(profile: &EquilibriumProfile) -> Result<Vec<f64>> {
    (0..profile.game().n())
        .map(|i| expected_utility(profile.strategy(i), &profile.opponents(i)))
        .collect()
}
