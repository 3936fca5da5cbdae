use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lotto::io::{read_strategies_csv, write_strategies_csv};
use lotto::solver::{best_response, grid_exploitability};
use lotto::utility::{profile_utilities, win_prob};
use lotto::{Atom, BidGrid, DiscreteStrategy, EquilibriumProfile, GameSpec, PiecewiseCdf, Regime, Segment, Strategy as Mixed};

const CAP: f64 = 4.0;

/// Atoms on a coarse lattice (so players tie often) plus up to two disjoint segments.
fn piecewise() -> impl Strategy<Value = PiecewiseCdf> {
    (
        prop::collection::vec((0usize..=8, 0.05f64..1.0), 0..4),
        prop::collection::vec((0.0f64..1.0, 0.05f64..1.0, 0.1f64..2.0), 0..3),
    )
        .prop_filter_map("empty distribution", |(atoms, segs)| {
            let mut out_atoms: Vec<Atom> = Vec::new();
            for (slot, mass) in atoms {
                let at = slot as f64 * CAP / 8.0;
                if !out_atoms.iter().any(|a| a.at == at) {
                    out_atoms.push(Atom { at, mass });
                }
            }
            let mut out_segs = Vec::new();
            let mut cursor = 0.0;
            for (gap, width, density) in segs {
                let lo = cursor + gap;
                let hi = lo + width;
                if hi > CAP {
                    break;
                }
                out_segs.push(Segment { lo, hi, density });
                cursor = hi;
            }
            let total: f64 =
                out_atoms.iter().map(|a| a.mass).sum::<f64>() + out_segs.iter().map(|s| s.mass()).sum::<f64>();
            if total == 0.0 {
                return None;
            }
            out_atoms.iter_mut().for_each(|a| a.mass /= total);
            out_segs.iter_mut().for_each(|s| s.density /= total);
            let rest = 1.0 - out_atoms.iter().map(|a| a.mass).sum::<f64>() - out_segs.iter().map(|s| s.mass()).sum::<f64>();
            match (out_atoms.first_mut(), out_segs.first_mut()) {
                (Some(a), _) => a.mass += rest,
                (None, Some(s)) => s.density += rest / (s.hi - s.lo),
                _ => return None,
            }
            PiecewiseCdf::new(out_atoms, out_segs).ok()
        })
}

fn profile(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = EquilibriumProfile> {
    prop::collection::vec(piecewise(), n).prop_map(|cdfs| {
        let budgets = cdfs.iter().map(|c| c.expectation() + 0.5).collect();
        let game = GameSpec::new(budgets, Some(CAP)).unwrap();
        EquilibriumProfile::new(game, cdfs.into_iter().map(Into::into).collect(), Regime::Imported, None).unwrap()
    })
}

fn atomless() -> impl Strategy<Value = PiecewiseCdf> {
    piecewise().prop_filter("has atoms", |c| c.atoms().is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_monotone_with_left_limits(c in piecewise(), mut xs in prop::collection::vec(0.0f64..5.0, 2..40)) {
        xs.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for x in xs {
            let (f, left) = c.cdf(x).unwrap();
            prop_assert!(f + 1e-15 >= prev);
            prop_assert!(left <= f + 1e-15);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
            prev = f;
        }
        prop_assert!((c.cdf(CAP).unwrap().0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(c in piecewise(), u in 0.0f64..1.0) {
        let x = c.quantile(u);
        prop_assert!(c.cdf(x).unwrap().0 + 1e-12 >= u);
        prop_assert!(c.cdf(x).unwrap().1 <= u + 1e-12);
    }

    #[test]
    fn discretize_keeps_mass_and_mean(c in piecewise(), k in 1usize..400) {
        let grid = BidGrid::new(k, CAP).unwrap();
        let d = c.discretize(&grid).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((d.expectation() - c.expectation()).abs() <= CAP / k as f64);
    }

    #[test]
    fn win_prob_is_monotone(p in profile(2..=4), mut xs in prop::collection::vec(0.0f64..5.0, 2..30)) {
        xs.sort_by(f64::total_cmp);
        let opponents = p.opponents(0);
        let mut prev = 0.0;
        for x in xs {
            let w = win_prob(x, &opponents).unwrap();
            prop_assert!(w + 1e-12 >= prev);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&w));
            prev = w;
        }
    }

    #[test]
    fn utilities_sum_to_one(p in profile(2..=4)) {
        let total: f64 = profile_utilities(&p).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{}", total);
    }

    #[test]
    fn without_atoms_win_prob_is_product_of_cdfs(cs in prop::collection::vec(atomless(), 1..4), x in 0.0f64..5.0) {
        let strategies: Vec<Mixed> = cs.iter().cloned().map(Into::into).collect();
        let refs: Vec<&Mixed> = strategies.iter().collect();
        let product: f64 = cs.iter().map(|c| c.cdf(x).unwrap().0).product();
        prop_assert!((win_prob(x, &refs).unwrap() - product).abs() < 1e-12);
    }

    #[test]
    fn strategy_csv_round_trips(p in profile(2..=4)) {
        let mut buf = Vec::new();
        write_strategies_csv(&p, &mut buf).unwrap();
        let back = read_strategies_csv(buf.as_slice(), p.game().n(), None).unwrap();
        prop_assert_eq!(back.as_slice(), p.strategies());
    }

    #[test]
    fn best_response_is_feasible_and_beats_every_pure_bid(
        u in prop::collection::vec(0.0f64..1.0, 2..60),
        budget_frac in 0.0f64..1.3,
    ) {
        let grid = BidGrid::new(u.len() - 1, 3.0).unwrap();
        let budget = budget_frac * 3.0;
        let br = best_response(&u, budget, &grid).unwrap();
        prop_assert!(br.support.len() <= 2);
        prop_assert!((br.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(br.expected_bid(&grid) <= budget + 1e-12);
        for (x, v) in grid.points().iter().zip(&u) {
            if *x <= budget {
                prop_assert!(br.value + 1e-12 >= *v);
            }
        }
        prop_assert!((br.value - br.envelope_value_at_budget).abs() < 1e-12);
    }

    #[test]
    fn exploitability_is_nonnegative(raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 9), 2..4)) {
        let grid = BidGrid::new(8, 2.0).unwrap();
        let strategies: Vec<DiscreteStrategy> = raw
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r[0] += 1e-3;
                let s: f64 = r.iter().sum();
                let mut probs: Vec<f64> = r.iter().map(|v| v / s).collect();
                probs[0] += 1.0 - probs.iter().sum::<f64>();
                DiscreteStrategy::new(grid, probs).unwrap()
            })
            .collect();
        let budgets: Vec<f64> = strategies.iter().map(|s| s.expectation() + 1e-9).collect();
        let e = grid_exploitability(&strategies, &budgets).unwrap();
        prop_assert!(e.value >= 0.0);
        for g in e.gains {
            prop_assert!(g >= -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn samples_follow_the_cdf(c in piecewise(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draws: Vec<f64> = (0..100_000).map(|_| c.sample(&mut rng)).collect();
        draws.sort_by(f64::total_cmp);
        let m = draws.len() as f64;
        let mut ks = 0.0f64;
        let mut i = 0;
        while i < draws.len() {
            let x = draws[i];
            let mut j = i;
            while j < draws.len() && draws[j] == x {
                j += 1;
            }
            let (f, left) = c.cdf(x).unwrap();
            ks = ks.max((j as f64 / m - f).abs()).max((i as f64 / m - left).abs());
            i = j;
        }
        prop_assert!(ks <= 0.01, "KS distance {}", ks);
    }
}
