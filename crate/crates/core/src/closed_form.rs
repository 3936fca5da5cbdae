//! Exact equilibria: the degenerate threshold case for any number of players
//! and the three two-player regimes.

use crate::error::{LottoError, Result};
use crate::model::{Affine, Atom, EquilibriumProfile, GameSpec, PiecewiseCdf, Regime, Segment, Strategy};

/// Equilibrium of a two-player game, with the strong (larger-budget) player first.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlayerSolution {
    pub regime: Regime,
    /// Top of the continuous part: `2 B1` in the low-budget regime, `L' = 2T - 2B1`
    /// in the mid-budget regime, `0` in the high-budget regime.
    pub support_break: f64,
    pub strong: PiecewiseCdf,
    pub weak: PiecewiseCdf,
    /// `F2(0)`.
    pub weak_at_zero: f64,
    /// `F1(L')`.
    pub strong_at_break: f64,
    /// `F2(L')`.
    pub weak_at_break: f64,
    /// Atom masses at the cap `T` for the strong and weak player.
    pub cap_atoms: (f64, f64),
    pub affine: Option<[Affine; 2]>,
    game: GameSpec,
    /// Caller indices of the strong and weak player.
    order: [usize; 2],
}

impl TwoPlayerSolution {
    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    /// Strategies in the caller's player order.
    pub fn into_profile(self) -> Result<EquilibriumProfile> {
        let [s, w] = self.order;
        let mut strategies: Vec<Option<Strategy>> = vec![None, None];
        strategies[s] = Some(self.strong.into());
        strategies[w] = Some(self.weak.into());
        let affine = self.affine.map(|[a_s, a_w]| {
            let mut v = vec![a_s; 2];
            v[w] = a_w;
            v
        });
        let strategies = strategies.into_iter().map(Option::unwrap).collect();
        EquilibriumProfile::new(self.game, strategies, self.regime, affine)
    }
}

/// Equilibrium when the threshold does not exceed the largest budget: players
/// who can afford `T` bid it surely, everyone else bids `T` with probability
/// `B_i / T` and `0` otherwise.
pub fn solve_degenerate_threshold(game: &GameSpec) -> Result<EquilibriumProfile> {
    let strategies = degenerate_strategies(game)?.into_iter().map(Strategy::from).collect();
    EquilibriumProfile::new(game.clone(), strategies, Regime::DegenerateThreshold, None)
}

fn degenerate_strategies(game: &GameSpec) -> Result<Vec<PiecewiseCdf>> {
    let t = game
        .threshold()
        .ok_or_else(|| LottoError::WrongRegime("the degenerate construction needs a threshold".into()))?;
    if t > game.max_budget() {
        return Err(LottoError::WrongRegime(format!(
            "threshold {t} exceeds every budget (max {})",
            game.max_budget()
        )));
    }
    game.budgets()
        .iter()
        .map(|&b| {
            if b >= t {
                PiecewiseCdf::point(t)
            } else {
                let high = b / t;
                PiecewiseCdf::new(
                    vec![Atom { at: 0.0, mass: 1.0 - high }, Atom { at: t, mass: high }],
                    vec![],
                )
            }
        })
        .collect()
}

/// Two-player equilibrium for every threshold. Without a threshold the game is
/// solved under the non-binding cap `2^5 * max B`, which always lands in the
/// low-budget regime.
pub fn solve_two_player(game: &GameSpec) -> Result<TwoPlayerSolution> {
    if game.n() != 2 {
        return Err(LottoError::WrongRegime(format!(
            "two-player closed form called with {} players",
            game.n()
        )));
    }
    let order = [game.descending_order()[0], game.descending_order()[1]];
    let b1 = game.budget(order[0]);
    let b2 = game.budget(order[1]);
    if b2 > b1 {
        return Err(LottoError::Internal("budgets not sorted".into()));
    }
    let t = game.effective_cap();

    if b1 >= t {
        let mut cdfs = degenerate_strategies(game)?;
        let weak = cdfs.swap_remove(order[1]);
        let strong = cdfs.swap_remove(0);
        let weak_at_zero = weak.cdf(0.0)?.0;
        let cap_atoms = (strong.atom_mass_at(t), weak.atom_mass_at(t));
        return Ok(TwoPlayerSolution {
            regime: Regime::TwoPlayerHighBudget,
            support_break: 0.0,
            strong,
            weak,
            weak_at_zero,
            strong_at_break: 0.0,
            weak_at_break: weak_at_zero,
            cap_atoms,
            affine: None,
            game: game.clone(),
            order,
        });
    }

    let weak_at_zero = 1.0 - b2 / b1;
    let weak_slope = b2 / (2.0 * b1 * b1);
    let strong_slope = 1.0 / (2.0 * b1);

    if 2.0 * b1 <= t {
        let top = 2.0 * b1;
        let strong = PiecewiseCdf::new(vec![], vec![Segment { lo: 0.0, hi: top, density: strong_slope }])?;
        let weak = PiecewiseCdf::new(
            zero_atom(weak_at_zero),
            vec![Segment { lo: 0.0, hi: top, density: weak_slope }],
        )?;
        return Ok(TwoPlayerSolution {
            regime: Regime::TwoPlayerLowBudget,
            support_break: top,
            strong,
            weak,
            weak_at_zero,
            strong_at_break: 1.0,
            weak_at_break: 1.0,
            cap_atoms: (0.0, 0.0),
            affine: Some([
                Affine { slope: weak_slope, intercept: weak_at_zero },
                Affine { slope: strong_slope, intercept: 0.0 },
            ]),
            game: game.clone(),
            order,
        });
    }

    // T/2 < B1 < T. Indifference of the strong player between 0+, L' and T
    // together with both budget constraints pins down the four constants.
    let brk = 2.0 * t - 2.0 * b1;
    let strong_at_break = t / b1 - 1.0;
    let strong_cap_atom = 1.0 - strong_at_break;
    let strong_line = (1.0 - weak_at_zero) / (2.0 * t - brk);
    let weak_at_break = weak_at_zero + strong_line * brk;
    let weak_cap_atom = 1.0 - weak_at_break;

    let plateau = 1.0 - b2 * (2.0 * b1 - t) / (b1 * b1);
    if (plateau - weak_at_break).abs() > 1e-12 || (strong_line - weak_slope).abs() > 1e-12 {
        return Err(LottoError::Internal(format!(
            "mid-budget constants disagree: F2(L') = {weak_at_break} vs {plateau}"
        )));
    }
    if !(strong_cap_atom > 0.0 && weak_cap_atom > 0.0 && brk > 0.0) {
        return Err(LottoError::WrongRegime(format!(
            "mid-budget construction produced nonpositive masses ({strong_cap_atom}, {weak_cap_atom})"
        )));
    }

    let strong = PiecewiseCdf::new(
        vec![Atom { at: t, mass: strong_cap_atom }],
        vec![Segment { lo: 0.0, hi: brk, density: strong_slope }],
    )?;
    let mut weak_atoms = zero_atom(weak_at_zero);
    weak_atoms.push(Atom { at: t, mass: weak_cap_atom });
    let weak = PiecewiseCdf::new(weak_atoms, vec![Segment { lo: 0.0, hi: brk, density: strong_line }])?;

    Ok(TwoPlayerSolution {
        regime: Regime::TwoPlayerMidBudget,
        support_break: brk,
        strong,
        weak,
        weak_at_zero,
        strong_at_break,
        weak_at_break,
        cap_atoms: (strong_cap_atom, weak_cap_atom),
        affine: Some([
            Affine { slope: strong_line, intercept: weak_at_zero },
            Affine { slope: strong_slope, intercept: 0.0 },
        ]),
        game: game.clone(),
        order,
    })
}

fn zero_atom(mass: f64) -> Vec<Atom> {
    if mass > 0.0 {
        vec![Atom { at: 0.0, mass }]
    } else {
        vec![]
    }
}

/// Dispatches to the closed form that covers `game`.
pub fn solve_closed_form(game: &GameSpec) -> Result<EquilibriumProfile> {
    if game.threshold_binds() {
        if game.n() == 2 {
            return solve_two_player(game)?.into_profile();
        }
        return solve_degenerate_threshold(game);
    }
    if game.n() == 2 {
        return solve_two_player(game)?.into_profile();
    }
    Err(LottoError::WrongRegime(format!(
        "no closed form for {} players unless the threshold is at most the largest budget",
        game.n()
    )))
}
