use std::sync::Arc;

use rayon::prelude::*;

use super::scattering::{KappaField, ScriBox};
use crate::error::{Error, Result};
use crate::klein::{flag_from_slopes, geodesic_chart_line, null_direction, scri_point, ChartLine, ChartPoint};
use crate::linalg::det4;

/// A three-parameter family of null lines in the affine chart, labelled by
/// points `(u, x, y)` of scri.
pub trait GeodesicFamily: Send + Sync {
    fn line(&self, u: f64, x: f64, y: f64) -> Result<ChartLine>;
}

/// The lines of the flags `(L, M)` assigns to each point of scri.
#[derive(Debug, Clone)]
pub struct KappaFamily {
    pub kappa: KappaField,
}

impl GeodesicFamily for KappaFamily {
    fn line(&self, u: f64, x: f64, y: f64) -> Result<ChartLine> {
        let (l, m) = self.kappa.slopes(u, x, y)?;
        geodesic_chart_line(&flag_from_slopes(&scri_point(u, x, y), l, m)?)
    }
}

/// `Phi(u, x, y, t) = [[t, x], [y, u]]`: every line has direction `E11`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParallelFamily;

impl GeodesicFamily for ParallelFamily {
    fn line(&self, u: f64, x: f64, y: f64) -> Result<ChartLine> {
        Ok(ChartLine { origin: ChartPoint::from_vec([0.0, x, y, u]), direction: [1.0, 0.0, 0.0, 0.0] })
    }
}

/// Another family with each direction `s tᵀ` replaced by `(R s) tᵀ`, where
/// `R` rotates by the angle `rate · x`. Still null, generally not shearfree.
#[derive(Clone)]
pub struct TwistedFamily {
    pub inner: Arc<dyn GeodesicFamily>,
    pub rate: f64,
}

impl GeodesicFamily for TwistedFamily {
    fn line(&self, u: f64, x: f64, y: f64) -> Result<ChartLine> {
        let line = self.inner.line(u, x, y)?;
        let (s, t) = split_rank_one(&line.direction);
        let (sin, cos) = (self.rate * x).sin_cos();
        let s = [cos * s[0] - sin * s[1], sin * s[0] + cos * s[1]];
        Ok(ChartLine { origin: line.origin, direction: null_direction(s, t) })
    }
}

/// Index of the largest-magnitude entry, lowest on ties.
pub(crate) fn pivot(v: &[f64; 4]) -> usize {
    (1..4).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best })
}

/// `N = s tᵀ` with `t` normalized at the pivot entry of `N`.
pub(crate) fn split_rank_one(n: &[f64; 4]) -> ([f64; 2], [f64; 2]) {
    split_at(n, pivot(n))
}

pub(crate) fn split_at(n: &[f64; 4], p: usize) -> ([f64; 2], [f64; 2]) {
    let (i, j) = (p / 2, p % 2);
    let s = [n[j], n[2 + j]];
    let t = [n[2 * i] / n[p], n[2 * i + 1] / n[p]];
    (s, t)
}

pub(crate) fn outer(s: &[f64; 2], t: &[f64; 2]) -> [f64; 4] {
    [s[0] * t[0], s[0] * t[1], s[1] * t[0], s[1] * t[1]]
}

/// A family of null lines over a box of scri, swept for `t` in a range.
#[derive(Clone)]
pub struct Congruence {
    pub family: Arc<dyn GeodesicFamily>,
    pub domain: ScriBox,
    /// Affine parameter samples along each line.
    pub t: Vec<f64>,
}

impl std::fmt::Debug for Congruence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Congruence").field("domain", &self.domain).field("t", &self.t).finish_non_exhaustive()
    }
}

/// Parameter step for the Jacobian of `Phi`.
pub const JACOBIAN_STEP: f64 = 1e-3;

impl Congruence {
    pub fn new(family: Arc<dyn GeodesicFamily>, domain: ScriBox, t: Vec<f64>) -> Self {
        Self { family, domain, t }
    }

    pub fn phi(&self, u: f64, x: f64, y: f64, t: f64) -> Result<ChartPoint> {
        Ok(self.family.line(u, x, y)?.at(t))
    }

    /// Tangent `∂Phi/∂t`, normalized with largest entry `+1`.
    pub fn k(&self, u: f64, x: f64, y: f64) -> Result<[f64; 4]> {
        Ok(self.family.line(u, x, y)?.direction)
    }

    /// `∂Phi/∂(u, x, y, t)` as columns, by Richardson-refined central differences.
    pub fn jac(&self, u: f64, x: f64, y: f64, t: f64, h: f64) -> Result<[[f64; 4]; 4]> {
        let jet = super::shear::LineJet::new(self.family.as_ref(), [u, x, y], h)?;
        Ok(jet.jacobian(t))
    }

    /// Checks that `det ∂Phi` keeps one sign over the domain grid and the
    /// `t`-samples; locates a zero by bisection otherwise.
    pub fn check_foliation(&self, h: f64) -> Result<()> {
        let pts = self.domain.points();
        let dets: Vec<Vec<f64>> = pts
            .par_iter()
            .map(|&p| {
                let jet = super::shear::LineJet::new(self.family.as_ref(), p, h)?;
                Ok(self.t.iter().map(|&t| det4(&transpose(&jet.jacobian(t)))).collect())
            })
            .collect::<Result<_>>()?;
        let reference = dets.iter().flatten().copied().find(|d| *d != 0.0).unwrap_or(0.0);
        let scale = dets.iter().flatten().fold(0.0_f64, |m, d| m.max(d.abs()));
        if reference == 0.0 {
            return Err(Error::FoliationFailure { at: [pts[0][0], pts[0][1], pts[0][2], self.t[0]] });
        }
        for (p, row) in pts.iter().zip(&dets) {
            for (&t, &d) in self.t.iter().zip(row) {
                if d.signum() != reference.signum() || d.abs() <= 1e-12 * scale {
                    return Err(Error::FoliationFailure { at: self.bisect(*p, t, reference, h)? });
                }
            }
        }
        Ok(())
    }

    /// Bisects the sign change on the segment from the first grid sample to a bad one.
    fn bisect(&self, bad: [f64; 3], t_bad: f64, reference: f64, h: f64) -> Result<[f64; 4]> {
        let (p0, t0) = (self.domain.points()[0], self.t[0]);
        let at = |s: f64| -> [f64; 4] {
            let p = [0, 1, 2].map(|i| p0[i] + s * (bad[i] - p0[i]));
            [p[0], p[1], p[2], t0 + s * (t_bad - t0)]
        };
        let same = |s: f64| -> Result<bool> {
            let q = at(s);
            let jet = super::shear::LineJet::new(self.family.as_ref(), [q[0], q[1], q[2]], h)?;
            Ok(det4(&transpose(&jet.jacobian(q[3]))) * reference > 0.0)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        if !(same(lo)? && !same(hi)?) {
            return Ok(at(hi));
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if same(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(at(hi))
    }
}

pub(crate) fn transpose(m: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[j][i] = m[i][j];
        }
    }
    out
}

/// Default `t`-samples: five points on `[-1, 1]`.
pub fn default_t_samples() -> Vec<f64> {
    vec![-1.0, -0.5, 0.0, 0.5, 1.0]
}

/// The congruence of `kappa` over its domain, checked to foliate.
pub fn build_congruence(kappa: KappaField) -> Result<Congruence> {
    let domain = kappa.domain;
    let c = Congruence::new(Arc::new(KappaFamily { kappa }), domain, default_t_samples());
    c.check_foliation(JACOBIAN_STEP)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_split_recovers_the_direction() {
        let n = null_direction([0.3, -1.2], [2.0, 0.5]);
        assert_eq!(n[0] * n[3] - n[1] * n[2], 0.0);
        assert_eq!(n, crate::klein::normalize_direction(outer(&[0.3, -1.2], &[2.0, 0.5])));
        let (s, t) = split_rank_one(&n);
        let back = outer(&s, &t);
        for i in 0..4 {
            assert!((back[i] - n[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn parallel_family_has_constant_direction() {
        let dom = ScriBox { u: (0.0, 1.0), x: (0.0, 1.0), y: (0.0, 1.0), n: [3, 3, 3] };
        let c = Congruence::new(Arc::new(ParallelFamily), dom, default_t_samples());
        for [u, x, y] in dom.points() {
            assert_eq!(c.k(u, x, y).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        }
        c.check_foliation(JACOBIAN_STEP).unwrap();
    }

    #[test]
    fn degenerate_family_fails_to_foliate() {
        struct Pencil;
        impl GeodesicFamily for Pencil {
            fn line(&self, _u: f64, x: f64, y: f64) -> Result<ChartLine> {
                // Independent of u: the family is only two-dimensional.
                Ok(ChartLine { origin: ChartPoint::from_vec([0.0, x, y, 0.0]), direction: [1.0, 0.0, 0.0, 0.0] })
            }
        }
        let dom = ScriBox { u: (0.0, 1.0), x: (0.0, 1.0), y: (0.0, 1.0), n: [2, 2, 2] };
        let c = Congruence::new(Arc::new(Pencil), dom, vec![0.0]);
        assert!(matches!(c.check_foliation(JACOBIAN_STEP), Err(Error::FoliationFailure { .. })));
    }
}
