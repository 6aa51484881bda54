//! Projective linear algebra over a fixed small real vector space.
//!
//! Subspaces are stored in reduced row echelon form, so two subspaces built at
//! the same tolerance are equal exactly when their basis rows agree. The
//! ambient dimension is a const parameter: twistor space is `N = 4`, the
//! projective plane of the Burgers' picture is `N = 3`.

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs};

/// Default pivot threshold for row reduction.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A point of projective space in homogeneous coordinates.
///
/// Normalized so that the largest-magnitude coordinate equals `+1`; on exact
/// ties the lowest index is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint<const N: usize> {
    coords: [f64; N],
}

impl<const N: usize> HPoint<N> {
    pub fn new(coords: [f64; N]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite homogeneous coordinate".into()));
        }
        let mut idx = 0;
        for i in 1..N {
            if coords[i].abs() > coords[idx].abs() {
                idx = i;
            }
        }
        let lead = coords[idx];
        if lead == 0.0 {
            return Err(Error::ZeroSubspace { tol: 0.0 });
        }
        let mut c = coords.map(|v| v / lead);
        c[idx] = 1.0;
        Ok(Self { coords: c })
    }

    pub fn coords(&self) -> &[f64; N] {
        &self.coords
    }

    /// Distance on projective space: sine of the angle between representatives.
    pub fn angle_sine(&self, other: &Self) -> f64 {
        let a = &self.coords;
        let b = &other.coords;
        let mut wedge = 0.0;
        for i in 0..N {
            for j in i + 1..N {
                let m = a[i] * b[j] - a[j] * b[i];
                wedge += m * m;
            }
        }
        (wedge / (linalg::dot(a, a) * linalg::dot(b, b))).sqrt()
    }
}

impl HPoint<3> {
    /// The line through two points, or the intersection point of two lines.
    pub fn cross(&self, other: &Self) -> Result<Self> {
        Self::new(linalg::cross(&self.coords, &other.coords))
    }
}

/// Incidence pairing `sum x_i y_i` of the canonical representatives.
pub fn pairing<const N: usize>(x: &HPoint<N>, y: &HPoint<N>) -> f64 {
    linalg::dot(&x.coords, &y.coords)
}

/// A linear subspace of `R^N` in canonical row-reduced form.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<const N: usize> {
    basis: Vec<[f64; N]>,
    pivots: Vec<usize>,
    tol: f64,
}

impl<const N: usize> Subspace<N> {
    /// The zero subspace. A legal value: meets of skew subspaces produce it.
    pub fn zero(tol: f64) -> Self {
        Self { basis: Vec::new(), pivots: Vec::new(), tol }
    }

    /// The whole ambient space.
    pub fn full(tol: f64) -> Self {
        let basis = (0..N)
            .map(|i| {
                let mut e = [0.0; N];
                e[i] = 1.0;
                e
            })
            .collect();
        Self { basis, pivots: (0..N).collect(), tol }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[[f64; N]] {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Re-runs the reduction on the stored rows.
    pub fn recanonicalize(&self) -> Self {
        let (basis, pivots) = linalg::rref(self.basis.clone(), self.tol);
        Self { basis, pivots, tol: self.tol }
    }

    /// Annihilator in the dual space, expressed in the dual standard basis.
    pub fn annihilator(&self) -> Self {
        let rows = linalg::null_space(&self.basis, &self.pivots);
        let (basis, pivots) = linalg::rref(rows, self.tol);
        Self { basis, pivots, tol: self.tol }
    }

    /// Distance of `v` from the row space, in max-norm.
    pub fn residual(&self, v: &[f64; N]) -> f64 {
        let mut r = *v;
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let f = v[pc];
            for (ri, bi) in r.iter_mut().zip(row) {
                *ri -= f * bi;
            }
        }
        max_abs(&r)
    }

    pub fn contains_vector(&self, v: &[f64; N]) -> bool {
        self.residual(v) <= self.tol * max_abs(v).max(1.0)
    }

    pub(crate) fn expect_dim(&self, d: usize) -> Result<()> {
        if self.dim() == d {
            Ok(())
        } else {
            Err(Error::WrongDimension { expected: d, found: self.dim() })
        }
    }
}

/// Canonical subspace spanned by `rows`; its dimension is the numerical rank.
pub fn span_canonical<const N: usize>(rows: &[[f64; N]], tol: f64) -> Result<Subspace<N>> {
    if rows.is_empty() || !(tol > 0.0) {
        return Err(Error::InvalidArgument("span needs at least one row and tol > 0".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite row entry".into()));
    }
    let (basis, pivots) = linalg::rref(rows.to_vec(), tol);
    if basis.is_empty() {
        return Err(Error::ZeroSubspace { tol });
    }
    Ok(Subspace { basis, pivots, tol })
}

/// Intersection `U ∩ V`, computed as the annihilator of `ann(U) + ann(V)`.
pub fn meet<const N: usize>(u: &Subspace<N>, v: &Subspace<N>) -> Subspace<N> {
    let tol = u.tol.max(v.tol);
    if u.dim() == 0 || v.dim() == 0 {
        return Subspace::zero(tol);
    }
    let mut rows = linalg::null_space(&u.basis, &u.pivots);
    rows.extend(linalg::null_space(&v.basis, &v.pivots));
    if rows.is_empty() {
        return Subspace::full(tol);
    }
    let (ann, piv) = linalg::rref(rows, tol);
    let inter = linalg::null_space(&ann, &piv);
    if inter.is_empty() {
        return Subspace::zero(tol);
    }
    let (basis, pivots) = linalg::rref(inter, tol);
    Subspace { basis, pivots, tol }
}

/// Sum `U + V` in canonical form.
pub fn join<const N: usize>(u: &Subspace<N>, v: &Subspace<N>) -> Subspace<N> {
    let tol = u.tol.max(v.tol);
    let rows: Vec<[f64; N]> = u.basis.iter().chain(&v.basis).copied().collect();
    if rows.is_empty() {
        return Subspace::zero(tol);
    }
    let (basis, pivots) = linalg::rref(rows, tol);
    Subspace { basis, pivots, tol }
}

/// True when every basis row of `v` lies in the row space of `u` within tolerance.
pub fn contains<const N: usize>(u: &Subspace<N>, v: &Subspace<N>) -> bool {
    if v.dim() > u.dim() {
        return false;
    }
    v.basis.iter().all(|row| u.contains_vector(row))
}

/// An incident pair `V1 ⊂ V3` in twistor space: an unparametrized null geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct PNFlag {
    v1: Subspace<4>,
    v3: Subspace<4>,
}

impl PNFlag {
    pub fn new(v1: Subspace<4>, v3: Subspace<4>) -> Result<Self> {
        v1.expect_dim(1)?;
        v3.expect_dim(3)?;
        if !contains(&v3, &v1) {
            return Err(Error::NotIncident { residual: v3.residual(&v1.basis[0]) });
        }
        Ok(Self { v1, v3 })
    }

    pub fn v1(&self) -> &Subspace<4> {
        &self.v1
    }

    pub fn v3(&self) -> &Subspace<4> {
        &self.v3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];

    fn add(a: [f64; 4], b: [f64; 4], s: f64) -> [f64; 4] {
        [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
    }

    #[test]
    fn span_examples() {
        let s = span_canonical(&[E[0], E[1]], DEFAULT_TOL).unwrap();
        assert_eq!(s.basis(), &[E[0], E[1]]);
        let s = span_canonical(&[E[0], [2.0, 0.0, 0.0, 0.0]], DEFAULT_TOL).unwrap();
        assert_eq!(s.basis(), &[E[0]]);
        let s = span_canonical(&[add(E[0], E[1], 1.0), add(E[0], E[1], -1.0), E[0]], DEFAULT_TOL).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn span_of_zero_rows_is_an_error() {
        let err = span_canonical(&[[1e-13, 0.0, 0.0, 0.0]], DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::ZeroSubspace { .. }));
    }

    #[test]
    fn meet_examples() {
        let a = span_canonical(&[E[0], E[1]], DEFAULT_TOL).unwrap();
        let b = span_canonical(&[E[1], E[2]], DEFAULT_TOL).unwrap();
        assert_eq!(meet(&a, &b).basis(), &[E[1]]);
        let c = span_canonical(&[E[2], E[3]], DEFAULT_TOL).unwrap();
        assert_eq!(meet(&a, &c).dim(), 0);
    }

    #[test]
    fn join_examples() {
        let a = span_canonical(&[E[0]], DEFAULT_TOL).unwrap();
        let b = span_canonical(&[E[1]], DEFAULT_TOL).unwrap();
        assert_eq!(join(&a, &b).basis(), &[E[0], E[1]]);
        let u = span_canonical(&[[1.0, 2.0, 3.0, 4.0], [0.5, -1.0, 0.0, 2.0]], DEFAULT_TOL).unwrap();
        assert_eq!(join(&u, &u), u);
    }

    #[test]
    fn contains_examples() {
        let u = span_canonical(&[E[0], E[1], E[2]], DEFAULT_TOL).unwrap();
        let v = span_canonical(&[add(E[0], E[1], 1.0)], DEFAULT_TOL).unwrap();
        assert!(contains(&u, &v));
        let a = span_canonical(&[E[0], E[1]], DEFAULT_TOL).unwrap();
        let e3 = span_canonical(&[E[2]], DEFAULT_TOL).unwrap();
        assert!(!contains(&a, &e3));
        assert!(!contains(&e3, &a));
    }

    #[test]
    fn pairing_examples() {
        let p = |c: [f64; 3]| HPoint::new(c).unwrap();
        assert_eq!(pairing(&p([1.0, 0.0, 0.0]), &p([0.0, 0.0, 1.0])), 0.0);
        assert!(pairing(&p([1.0, 2.0, 3.0]), &p([3.0, 0.0, -1.0])).abs() < 1e-15);
        // (1,1,1) is already canonical, so the pairing is the raw sum.
        assert_eq!(pairing(&p([1.0, 1.0, 1.0]), &p([1.0, 1.0, 1.0])), 3.0);
    }

    #[test]
    fn hpoint_normalization() {
        let p = HPoint::new([-2.0, 1.0, 2.0]).unwrap();
        assert_eq!(p.coords(), &[1.0, -0.5, -1.0]);
        assert!(HPoint::new([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn annihilator_of_hyperplane() {
        let v3 = span_canonical(&[E[0], E[1], add(E[2], E[3], 2.0)], DEFAULT_TOL).unwrap();
        let ann = v3.annihilator();
        assert_eq!(ann.dim(), 1);
        for r in v3.basis() {
            assert!(linalg::dot(r, &ann.basis()[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn flag_requires_incidence() {
        let v1 = span_canonical(&[E[3]], DEFAULT_TOL).unwrap();
        let v3 = span_canonical(&[E[0], E[1], E[2]], DEFAULT_TOL).unwrap();
        assert!(matches!(PNFlag::new(v1, v3), Err(Error::NotIncident { .. })));
    }
}
