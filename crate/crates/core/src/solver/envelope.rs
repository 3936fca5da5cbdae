use serde::{Deserialize, Serialize};

use crate::error::{LottoError, Result};
use crate::model::BidGrid;

/// Optimal mixed bid against a fixed utility curve under an expected-bid budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    /// Grid indices of the (at most two) bids used.
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
    /// `Σ weights * u[support]`.
    pub value: f64,
    /// Upper concave envelope of the curve at `min(budget, peak)`.
    pub envelope_value_at_budget: f64,
}

impl BestResponse {
    pub fn expected_bid(&self, grid: &BidGrid) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * grid.point(*l))
            .sum()
    }
}

/// Vertices of the upper concave envelope of `{(x_l, u_l)}`. Collinear points
/// are dropped, so a flat stretch is represented by its two end vertices.
pub fn upper_envelope(xs: &[f64], us: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for l in 0..xs.len() {
        while let [.., a, b] = hull[..] {
            let cross = (xs[b] - xs[a]) * (us[l] - us[a]) - (us[b] - us[a]) * (xs[l] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    hull
}

/// Maximizes `Σ p_l u_l` over distributions `p` on the grid with
/// `Σ p_l x_l <= budget`.
///
/// The optimum is the upper concave envelope of the curve evaluated at the
/// budget. When the budget reaches the envelope peak the peak is bid purely
/// (leftmost maximizer); otherwise the two envelope vertices around the budget
/// are mixed so that the budget binds exactly.
pub fn best_response(u: &[f64], budget: f64, grid: &BidGrid) -> Result<BestResponse> {
    if u.len() != grid.len() {
        return Err(LottoError::Invalid(format!(
            "utility curve has {} entries for a grid of {} points",
            u.len(),
            grid.len()
        )));
    }
    if budget.is_nan() || budget < 0.0 {
        return Err(LottoError::Domain(format!("negative budget {budget}")));
    }
    if let Some(bad) = u.iter().find(|v| !v.is_finite()) {
        return Err(LottoError::Internal(format!("non-finite utility {bad}")));
    }

    let xs = grid.points();
    let hull = upper_envelope(&xs, u);
    let peak = hull
        .windows(2)
        .position(|w| u[w[1]] <= u[w[0]])
        .unwrap_or(hull.len() - 1);

    let pure = |l: usize| BestResponse {
        support: vec![l],
        weights: vec![1.0],
        value: u[l],
        envelope_value_at_budget: u[l],
    };

    if xs[hull[peak]] <= budget {
        return Ok(pure(hull[peak]));
    }
    // hull[0] is grid point 0, so some vertex lies at or below the budget
    let j = hull[..=peak]
        .iter()
        .rposition(|&l| xs[l] <= budget)
        .ok_or_else(|| LottoError::Internal("envelope does not start at zero".into()))?;
    let lo = hull[j];
    if xs[lo] == budget {
        return Ok(pure(lo));
    }
    let hi = hull[j + 1];
    let w_hi = (budget - xs[lo]) / (xs[hi] - xs[lo]);
    let w_lo = 1.0 - w_hi;
    let value = w_lo * u[lo] + w_hi * u[hi];
    Ok(BestResponse {
        support: vec![lo, hi],
        weights: vec![w_lo, w_hi],
        value,
        envelope_value_at_budget: u[lo] + (u[hi] - u[lo]) * (budget - xs[lo]) / (xs[hi] - xs[lo]),
    })
}
