use rand::Rng;
use serde::{Deserialize, Serialize};

use super::discrete::DiscreteStrategy;
use super::game::BidGrid;
use crate::error::{LottoError, Result};

/// Total-mass tolerance for constructed distributions.
pub const MASS_TOL: f64 = 1e-12;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// A piece of constant density on the closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

impl Segment {
    pub fn mass(&self) -> f64 {
        self.density * (self.hi - self.lo)
    }
}

/// A mixed distribution on the half-line made of atoms plus a piecewise-constant
/// density, so that the cdf is piecewise linear with jumps at the atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCdf", into = "RawCdf")]
pub struct PiecewiseCdf {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct RawCdf {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    segments: Vec<Segment>,
}

impl TryFrom<RawCdf> for PiecewiseCdf {
    type Error = LottoError;

    fn try_from(raw: RawCdf) -> Result<Self> {
        PiecewiseCdf::new(raw.atoms, raw.segments)
    }
}

impl From<PiecewiseCdf> for RawCdf {
    fn from(cdf: PiecewiseCdf) -> Self {
        RawCdf { atoms: cdf.atoms, segments: cdf.segments }
    }
}

impl PiecewiseCdf {
    /// Builds and validates a distribution. Atoms are sorted by location and
    /// zero-density segments are dropped.
    pub fn new(mut atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        for a in &atoms {
            if !(a.at.is_finite() && a.at >= 0.0) {
                return Err(LottoError::Invalid(format!("atom location must be finite and >= 0, got {}", a.at)));
            }
            if !(a.mass > 0.0 && a.mass <= 1.0 + MASS_TOL) {
                return Err(LottoError::Invalid(format!("atom mass must lie in (0, 1], got {}", a.mass)));
            }
        }
        atoms.sort_by(|a, b| a.at.total_cmp(&b.at));
        if atoms.windows(2).any(|w| w[0].at == w[1].at) {
            return Err(LottoError::Invalid("duplicate atom location".into()));
        }

        let mut segs = Vec::with_capacity(segments.len());
        for s in segments {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.lo >= 0.0 && s.lo < s.hi) {
                return Err(LottoError::Invalid(format!("bad segment [{}, {}]", s.lo, s.hi)));
            }
            if !(s.density.is_finite() && s.density >= 0.0) {
                return Err(LottoError::Invalid(format!("segment density must be >= 0, got {}", s.density)));
            }
            if s.density > 0.0 {
                segs.push(s);
            }
        }
        segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if segs.windows(2).any(|w| w[0].hi > w[1].lo) {
            return Err(LottoError::Invalid("segments overlap".into()));
        }

        let total: f64 = atoms.iter().map(|a| a.mass).sum::<f64>() + segs.iter().map(Segment::mass).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(LottoError::Invalid(format!("total mass must be 1, got {total}")));
        }
        Ok(Self { atoms, segments: segs })
    }

    /// Point mass at `x`.
    pub fn point(x: f64) -> Result<Self> {
        Self::new(vec![Atom { at: x, mass: 1.0 }], vec![])
    }

    /// Uniform distribution on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![], vec![Segment { lo, hi, density: 1.0 / (hi - lo) }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Right limit `F(x)` and left limit `F(x-)`.
    pub fn cdf(&self, x: f64) -> Result<(f64, f64)> {
        if x.is_nan() || x < 0.0 {
            return Err(LottoError::Domain(format!("cdf evaluated at negative bid {x}")));
        }
        let (below, equal) = self.split(x);
        Ok((below + equal, below))
    }

    /// `(P[X < x], P[X = x])` for any real `x`.
    pub fn split(&self, x: f64) -> (f64, f64) {
        let mut below = 0.0;
        let mut equal = 0.0;
        for a in &self.atoms {
            if a.at < x {
                below += a.mass;
            } else if a.at == x {
                equal = a.mass;
            } else {
                break;
            }
        }
        for s in &self.segments {
            if s.lo >= x {
                break;
            }
            below += s.density * (s.hi.min(x) - s.lo);
        }
        (below.min(1.0), equal)
    }

    /// Mass of the atom located exactly at `x`.
    pub fn atom_mass_at(&self, x: f64) -> f64 {
        self.atoms.iter().find(|a| a.at == x).map_or(0.0, |a| a.mass)
    }

    /// Density of the continuous part just to the right of `x`.
    pub fn density_right_of(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.lo <= x && x < s.hi)
            .map_or(0.0, |s| s.density)
    }

    pub fn expectation(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.at * a.mass).sum();
        let cont: f64 = self
            .segments
            .iter()
            .map(|s| s.density * 0.5 * (s.hi * s.hi - s.lo * s.lo))
            .sum();
        atoms + cont
    }

    pub fn support_min(&self) -> f64 {
        let a = self.atoms.first().map_or(f64::INFINITY, |a| a.at);
        let s = self.segments.first().map_or(f64::INFINITY, |s| s.lo);
        a.min(s)
    }

    pub fn support_max(&self) -> f64 {
        let a = self.atoms.last().map_or(0.0, |a| a.at);
        let s = self.segments.last().map_or(0.0, |s| s.hi);
        a.max(s)
    }

    /// Every location where the cdf has a jump or a kink.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms
            .iter()
            .map(|a| a.at)
            .chain(self.segments.iter().flat_map(|s| [s.lo, s.hi]))
    }

    /// Inverse cdf: the smallest `x` with `F(x) > u` for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut points: Vec<f64> = self.breakpoints().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        // between consecutive breakpoints the cdf is linear
        let mut prev = 0.0;
        let mut f_prev = 0.0;
        for x in points {
            let (below, equal) = self.split(x);
            if u < below {
                let density = self.density_right_of(prev);
                return (prev + (u - f_prev) / density).min(x);
            }
            if u < below + equal {
                return x;
            }
            prev = x;
            f_prev = below + equal;
        }
        self.support_max()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }

    /// Projects onto `grid`: each grid point receives the mass of its midpoint
    /// cell `(m_l, m_{l+1}]`, the end cells absorbing the tails. Atoms go to the
    /// nearest grid point with ties to the lower one.
    pub fn discretize(&self, grid: &BidGrid) -> Result<DiscreteStrategy> {
        let cap = grid.cap();
        if self.support_max() > cap * (1.0 + 1e-12) {
            return Err(LottoError::Domain(format!(
                "support reaches {} beyond the grid cap {cap}",
                self.support_max()
            )));
        }
        let k = grid.k();
        let mut probs = vec![0.0; k + 1];
        for a in &self.atoms {
            probs[grid.nearest_index(a.at)] += a.mass;
        }
        for s in &self.segments {
            let first = grid.nearest_index(s.lo);
            let last = grid.nearest_index(s.hi);
            for (l, p) in probs.iter_mut().enumerate().take(last + 1).skip(first) {
                let cell_lo = if l == 0 { f64::NEG_INFINITY } else { grid.lower_midpoint(l) };
                let cell_hi = if l == k { f64::INFINITY } else { grid.lower_midpoint(l + 1) };
                let width = s.hi.min(cell_hi) - s.lo.max(cell_lo);
                if width > 0.0 {
                    *p += s.density * width;
                }
            }
        }
        DiscreteStrategy::new(*grid, probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half_atom() -> PiecewiseCdf {
        PiecewiseCdf::new(vec![Atom { at: 0.0, mass: 0.5 }], vec![Segment { lo: 0.0, hi: 2.0, density: 0.25 }]).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let u = PiecewiseCdf::uniform(0.0, 2.0).unwrap();
        assert_eq!(u.cdf(1.0).unwrap(), (0.5, 0.5));
        let s = half_atom();
        assert_eq!(s.cdf(0.0).unwrap(), (0.5, 0.0));
        assert_eq!(s.cdf(2.0).unwrap(), (1.0, 1.0));
        assert_eq!(s.cdf(7.0).unwrap(), (1.0, 1.0));
        assert!(matches!(s.cdf(-0.1), Err(LottoError::Domain(_))));
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(PiecewiseCdf::uniform(0.0, 2.0).unwrap().expectation(), 1.0);
        assert_eq!(half_atom().expectation(), 0.5);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(PiecewiseCdf::point(2.0).unwrap().quantile(0.37), 2.0);
        assert_eq!(PiecewiseCdf::uniform(0.0, 2.0).unwrap().quantile(0.25), 0.5);
        // F(x) = 0.5 + 0.25 x  =>  F^{-1}(0.75) = 1
        assert_eq!(half_atom().quantile(0.75), 1.0);
        assert_eq!(half_atom().quantile(0.3), 0.0);
        // atom strictly inside a segment
        let mixed =
            PiecewiseCdf::new(vec![Atom { at: 0.5, mass: 0.5 }], vec![Segment { lo: 0.0, hi: 1.0, density: 0.5 }]).unwrap();
        assert_eq!(mixed.quantile(0.2), 0.4);
        assert_eq!(mixed.quantile(0.6), 0.5);
        assert!((mixed.quantile(0.8) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn point_mass_samples_constant() {
        let p = PiecewiseCdf::point(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(p.sample(&mut rng), 2.0);
        }
    }

    #[test]
    fn discretize_examples() {
        let g = BidGrid::new(2, 2.0).unwrap();
        let d = PiecewiseCdf::point(2.0).unwrap().discretize(&g).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.0, 1.0]);
        let d = PiecewiseCdf::uniform(0.0, 2.0).unwrap().discretize(&g).unwrap();
        assert_eq!(d.probs(), &[0.25, 0.5, 0.25]);
        // interval masses of F(x) = 0.5 + 0.25 x over (-inf,0.5], (0.5,1.5], (1.5,inf)
        let d = half_atom().discretize(&g).unwrap();
        let want = [0.625, 0.25, 0.125];
        for (p, w) in d.probs().iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
        let small = BidGrid::new(2, 1.0).unwrap();
        assert!(matches!(half_atom().discretize(&small), Err(LottoError::Domain(_))));
    }

    #[test]
    fn atom_on_midpoint_goes_low() {
        let g = BidGrid::new(2, 2.0).unwrap();
        let d = PiecewiseCdf::point(0.5).unwrap().discretize(&g).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(PiecewiseCdf::new(vec![Atom { at: 0.0, mass: 0.5 }], vec![]).is_err());
        assert!(PiecewiseCdf::new(
            vec![],
            vec![Segment { lo: 0.0, hi: 1.0, density: 0.5 }, Segment { lo: 0.5, hi: 1.5, density: 0.5 }]
        )
        .is_err());
        assert!(PiecewiseCdf::new(vec![Atom { at: -1.0, mass: 1.0 }], vec![]).is_err());
        assert!(PiecewiseCdf::new(
            vec![Atom { at: 1.0, mass: 0.5 }, Atom { at: 1.0, mass: 0.5 }],
            vec![]
        )
        .is_err());
    }
}
