//! Klein space as the Grassmannian of 2-planes in twistor space `T = R^4`.
//!
//! The point at infinity is `I = span{e1, e2}`. The affine spacetime chart is
//! `X ↦ rowspan[X | I₂]` for real 2×2 matrices `X`, with conformal metric
//! `q(X) = det X` of signature (2, 2). Scri is the null cone of `I`, charted by
//! `(u, x, y) ↦ span{e1 + x·e2, e3 + y·e4 + u·e2}`: `x` labels alpha-planes,
//! `y` labels beta-planes and `u` runs along the generators.

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs};
use crate::projlin::{contains, join, meet, span_canonical, PNFlag, Subspace, DEFAULT_TOL};

const E1: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
const E2: [f64; 4] = [0.0, 1.0, 0.0, 0.0];
const E3: [f64; 4] = [0.0, 0.0, 1.0, 0.0];
const E4: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

/// The vertex `I = span{e1, e2}` of scri.
pub fn infinity() -> Subspace<4> {
    span_canonical(&[E1, E2], DEFAULT_TOL).expect("standard basis vectors")
}

/// Normalized Plücker coordinates `(p12, p13, p14, p23, p24, p34)` of a 2-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluckerVector {
    p: [f64; 6],
}

impl PluckerVector {
    pub fn coords(&self) -> &[f64; 6] {
        &self.p
    }

    /// `p12·p34 − p13·p24 + p14·p23`, zero exactly on the Klein quadric.
    pub fn relation_residual(&self) -> f64 {
        let p = &self.p;
        p[0] * p[5] - p[1] * p[4] + p[2] * p[3]
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Wedges the two generators of a 2-plane.
pub fn plucker_embed(plane: &Subspace<4>) -> Result<PluckerVector> {
    if plane.dim() == 0 {
        return Err(Error::ZeroSubspace { tol: plane.tol() });
    }
    plane.expect_dim(2)?;
    let (a, b) = (plane.basis()[0], plane.basis()[1]);
    let mut p = PAIRS.map(|(i, j)| a[i] * b[j] - a[j] * b[i]);
    let mut lead = 0;
    for i in 1..6 {
        if p[i].abs() > p[lead].abs() {
            lead = i;
        }
    }
    let s = p[lead];
    for v in p.iter_mut() {
        *v /= s;
    }
    p[lead] = 1.0;
    Ok(PluckerVector { p })
}

/// The single component of `A ∧ B` in `∧⁴T`, computed from unit-normalized
/// generators. Vanishes exactly when the planes meet, i.e. when the two points
/// of Klein space are null separated.
pub fn null_separation(a: &Subspace<4>, b: &Subspace<4>) -> Result<f64> {
    a.expect_dim(2)?;
    b.expect_dim(2)?;
    let mut m = [[0.0; 4]; 4];
    for (row, src) in m.iter_mut().zip(a.basis().iter().chain(b.basis())) {
        let n = linalg::norm(src);
        *row = src.map(|v| v / n);
    }
    Ok(linalg::det4(&m))
}

/// A point of the affine chart, realized as the plane `rowspan[X | I₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub x: [[f64; 2]; 2],
}

impl ChartPoint {
    pub fn new(x: [[f64; 2]; 2]) -> Self {
        Self { x }
    }

    pub fn from_vec(v: [f64; 4]) -> Self {
        Self { x: [[v[0], v[1]], [v[2], v[3]]] }
    }

    /// Entries in row-major order `(X11, X12, X21, X22)`.
    pub fn to_vec(&self) -> [f64; 4] {
        [self.x[0][0], self.x[0][1], self.x[1][0], self.x[1][1]]
    }

    pub fn plane(&self) -> Subspace<4> {
        let x = &self.x;
        span_canonical(&[[x[0][0], x[0][1], 1.0, 0.0], [x[1][0], x[1][1], 0.0, 1.0]], DEFAULT_TOL)
            .expect("chart planes always have rank two")
    }

    pub fn det(&self) -> f64 {
        quadratic_form(&self.to_vec())
    }
}

/// The chart quadratic form `q(X) = det X` on row-major 2×2 entries.
pub fn quadratic_form(v: &[f64; 4]) -> f64 {
    v[0] * v[3] - v[1] * v[2]
}

/// Polarization of [`quadratic_form`]: `g(a, b) = (q(a+b) − q(a) − q(b)) / 2`.
pub fn chart_metric(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    0.5 * (a[0] * b[3] + a[3] * b[0] - a[1] * b[2] - a[2] * b[1])
}

/// A point of scri in chart coordinates together with its 2-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriPoint {
    pub u: f64,
    pub x: f64,
    pub y: f64,
    plane: Subspace<4>,
}

impl ScriPoint {
    pub fn plane(&self) -> &Subspace<4> {
        &self.plane
    }
}

pub fn scri_point(u: f64, x: f64, y: f64) -> ScriPoint {
    let plane = span_canonical(&[[1.0, x, 0.0, 0.0], [0.0, u, 1.0, y]], DEFAULT_TOL)
        .expect("chart rows are independent");
    ScriPoint { u, x, y, plane }
}

/// Where the null geodesic of `flag` meets scri: the unique `J` with `V1 ⊂ J ⊂ V3`
/// null-separated from `I`.
pub fn scri_intersection(flag: &PNFlag) -> Result<ScriPoint> {
    let inf = infinity();
    if contains(&inf, flag.v1()) || contains(flag.v3(), &inf) {
        return Err(Error::TangentAtInfinity);
    }
    let j = join(flag.v1(), &meet(&inf, flag.v3()));
    j.expect_dim(2)?;
    let w = meet(&j, &inf);
    w.expect_dim(1)?;
    let w = w.basis()[0];
    if w[0].abs() <= j.tol() * max_abs(&w) {
        return Err(Error::OutsideChart);
    }
    let x = w[1] / w[0];
    let hyper = span_canonical(&[E2, E3, E4], DEFAULT_TOL)?;
    let z = meet(&j, &hyper);
    if z.dim() != 1 {
        return Err(Error::OutsideChart);
    }
    let z = z.basis()[0];
    if z[2].abs() <= j.tol() * max_abs(&z) {
        return Err(Error::OutsideChart);
    }
    Ok(scri_point(z[1] / z[2], x, z[3] / z[2]))
}

fn normalized(v: &[f64; 4]) -> [f64; 4] {
    let m = max_abs(v);
    v.map(|c| c / m)
}

/// The alpha-plane of `v1` meets the beta-plane `{y = y0}` of scri in the line
/// `x = X0 + L·u`; returns `(X0, L)`.
pub fn alpha_trace_on_beta_plane(v1: &Subspace<4>, y0: f64) -> Result<(f64, f64)> {
    v1.expect_dim(1)?;
    let [a, b, c, d] = normalized(&v1.basis()[0]);
    let tol = v1.tol();
    let residual = (d - c * y0).abs();
    if residual > tol * (1.0 + y0.abs()) {
        return Err(Error::NotIncident { residual });
    }
    if a.abs() <= tol {
        return Err(Error::TangentDirection { value: a });
    }
    Ok((b / a, -c / a))
}

/// The beta-plane of `v3` meets the alpha-plane `{x = x0}` of scri in the line
/// `y = Y0 + M·u`; returns `(Y0, M)`.
pub fn beta_trace_on_alpha_plane(v3: &Subspace<4>, x0: f64) -> Result<(f64, f64)> {
    v3.expect_dim(3)?;
    let [w1, w2, w3, w4] = normalized(&v3.annihilator().basis()[0]);
    let tol = v3.tol();
    let residual = (w1 + x0 * w2).abs();
    if residual > tol * (1.0 + x0.abs()) {
        return Err(Error::NotIncident { residual });
    }
    if w4.abs() <= tol {
        return Err(Error::TangentDirection { value: w4 });
    }
    Ok((-w3 / w4, -w2 / w4))
}

/// Hyperplane `V3 = ker ω` from its defining covector.
pub fn hyperplane(omega: [f64; 4]) -> Result<Subspace<4>> {
    let ann = span_canonical(&[omega], DEFAULT_TOL)?;
    Ok(ann.annihilator())
}

/// The null polarity `v ↦ ker(vᵀG)` for the symplectic form with
/// `G14 = −1, G23 = 1`. It carries the alpha-trace of `v` on `{y = c}` to the
/// beta-trace of its image on `{x = c}`, and always yields a flag `v ⊂ V3`.
pub fn null_polarity(v1: &Subspace<4>) -> Result<Subspace<4>> {
    v1.expect_dim(1)?;
    let [a, b, c, d] = v1.basis()[0];
    hyperplane([d, -c, b, -a])
}

/// Pointwise datum of a section of null twistor space over scri: the flag
/// through `p` whose alpha-trace on the beta-plane of `p` has slope `l` and
/// whose beta-trace on the alpha-plane of `p` has slope `m`.
pub fn flag_from_slopes(p: &ScriPoint, l: f64, m: f64) -> Result<PNFlag> {
    let (u, x, y) = (p.u, p.x, p.y);
    let v1 = span_canonical(&[[1.0, x - l * u, -l, -l * y]], DEFAULT_TOL)?;
    let v3 = hyperplane([-x * m, m, y - u * m, -1.0])?;
    PNFlag::new(v1, v3)
}

/// A null geodesic of the affine chart, `X(t) = origin + t·direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartLine {
    pub origin: ChartPoint,
    /// Rank-one direction, scaled so its largest-magnitude entry is `+1`.
    pub direction: [f64; 4],
}

impl ChartLine {
    pub fn at(&self, t: f64) -> ChartPoint {
        let o = self.origin.to_vec();
        ChartPoint::from_vec([0, 1, 2, 3].map(|i| o[i] + t * self.direction[i]))
    }
}

/// Scales `v` so the largest-magnitude entry is `+1` (lowest index on ties).
pub fn normalize_direction(v: [f64; 4]) -> [f64; 4] {
    let mut lead = 0;
    for i in 1..4 {
        if v[i].abs() > v[lead].abs() {
            lead = i;
        }
    }
    let s = v[lead];
    let mut out = v.map(|c| c / s);
    out[lead] = 1.0;
    out
}

/// The rank-one direction `s tᵀ`, scaled so its largest-magnitude entry is
/// `+1`. Both factors are scaled to `1` at the pivot before multiplying, so
/// `det` of the result vanishes exactly in floating point.
pub fn null_direction(s: [f64; 2], t: [f64; 2]) -> [f64; 4] {
    let i = if s[1].abs() > s[0].abs() { 1 } else { 0 };
    let j = if t[1].abs() > t[0].abs() { 1 } else { 0 };
    let (si, tj) = (s[i], t[j]);
    let s = s.map(|c| c / si);
    let t = t.map(|c| c / tj);
    let mut out = [s[0] * t[0], s[0] * t[1], s[1] * t[0], s[1] * t[1]];
    out[2 * i + j] = 1.0;
    out
}

/// The chart points `X` with `V1 ⊂ rowspan[X | I₂] ⊂ V3`.
///
/// With `V1 = (ω, π)` and `V3 = ker(φ, ψ)` this is `πX = ω`, `Xφ = −ψ`, whose
/// solutions form the line through the minimum-norm solution along `s tᵀ`,
/// `s ⟂ π`, `t ⟂ φ`.
pub fn geodesic_chart_line(flag: &PNFlag) -> Result<ChartLine> {
    let [a, b, c, d] = normalized(&flag.v1().basis()[0]);
    let [f1, f2, f3, f4] = normalized(&flag.v3().annihilator().basis()[0]);
    let tol = flag.v1().tol();
    if c.abs().max(d.abs()) <= tol || f1.abs().max(f2.abs()) <= tol {
        return Err(Error::NoChartIntersection);
    }
    let s = [-d, c];
    let t = [-f2, f1];
    let dir = null_direction(s, t);
    let rows = [
        [c, 0.0, d, 0.0],
        [0.0, c, 0.0, d],
        [f1, f2, 0.0, 0.0],
        [0.0, 0.0, f1, f2],
    ];
    let rhs = [a, b, -f3, -f4];
    // Normal equations regularized along the null direction give the
    // minimum-norm solution.
    let nn = linalg::dot(&dir, &dir);
    let mut m = [[0.0; 4]; 4];
    let mut r = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = rows.iter().map(|row| row[i] * row[j]).sum::<f64>() + dir[i] * dir[j] / nn;
        }
        r[i] = rows.iter().zip(&rhs).map(|(row, b)| row[i] * b).sum();
    }
    let sol = linalg::solve4(&m, &r, 1e-14).ok_or(Error::NoChartIntersection)?;
    let origin = ChartPoint::from_vec(sol);
    Ok(ChartLine { origin, direction: dir })
}

/// Recovers the flag of a chart null line from two of its points.
pub fn flag_from_chart_line(line: &ChartLine) -> Result<PNFlag> {
    let p0 = line.at(0.0).plane();
    let p1 = line.at(1.0).plane();
    let v1 = meet(&p0, &p1);
    let v3 = join(&p0, &p1);
    if v1.dim() != 1 || v3.dim() != 3 {
        return Err(Error::IllConditioned("chart line direction is not null".into()));
    }
    PNFlag::new(v1, v3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(rows: &[[f64; 4]]) -> Subspace<4> {
        span_canonical(rows, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn plucker_of_infinity() {
        let p = plucker_embed(&infinity()).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn plucker_minor_example() {
        let p = plucker_embed(&span(&[[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]])).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0, 1.0, -1.0, 0.0, 1.0]);
        assert_eq!(p.relation_residual(), 0.0);
    }

    #[test]
    fn plucker_rejects_wrong_dimension() {
        assert!(plucker_embed(&span(&[E1])).is_err());
        assert!(matches!(plucker_embed(&Subspace::zero(1e-10)), Err(Error::ZeroSubspace { .. })));
    }

    #[test]
    fn separation_examples() {
        let a = ChartPoint::new([[0.0, 0.0], [0.0, 0.0]]).plane();
        assert_eq!(null_separation(&a, &a).unwrap(), 0.0);
        let b = ChartPoint::new([[1.0, 0.0], [0.0, 0.0]]).plane();
        assert!(null_separation(&a, &b).unwrap().abs() < 1e-15);
        let c = ChartPoint::new([[1.0, 0.0], [0.0, 1.0]]).plane();
        assert!(null_separation(&a, &c).unwrap().abs() > 0.1);
    }

    #[test]
    fn signature_witnesses() {
        assert_eq!(quadratic_form(&[1.0, 0.0, 0.0, 1.0]), 1.0);
        assert_eq!(quadratic_form(&[1.0, 0.0, 0.0, -1.0]), -1.0);
        assert_eq!(quadratic_form(&[1.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn scri_point_examples() {
        assert_eq!(scri_point(0.0, 0.0, 0.0).plane(), &span(&[E1, E3]));
        let p = scri_point(1.0, 2.0, 3.0);
        assert_eq!(p.plane(), &span(&[[1.0, 2.0, 0.0, 0.0], [0.0, 1.0, 1.0, 3.0]]));
        assert_eq!(meet(p.plane(), &infinity()).dim(), 1);
        assert!(null_separation(p.plane(), &infinity()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn scri_intersection_example() {
        let v1 = span(&[[1.0, 0.0, 1.0, 0.0]]);
        let v3 = span(&[[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0], [1.0, -1.0, 0.0, 0.0]]);
        let j = scri_intersection(&PNFlag::new(v1, v3).unwrap()).unwrap();
        assert_eq!(j.plane(), &span(&[[1.0, 0.0, 1.0, 0.0], [1.0, -1.0, 0.0, 0.0]]));
        assert!((j.u - 1.0).abs() < 1e-14 && (j.x + 1.0).abs() < 1e-14 && j.y.abs() < 1e-14);
    }

    #[test]
    fn scri_intersection_rejects_flags_through_infinity() {
        let v1 = span(&[E1]);
        let v3 = span(&[E1, E2, E3]);
        assert_eq!(
            scri_intersection(&PNFlag::new(v1, v3).unwrap()),
            Err(Error::TangentAtInfinity)
        );
    }

    #[test]
    fn alpha_trace_examples() {
        assert_eq!(alpha_trace_on_beta_plane(&span(&[[1.0, 0.0, -1.0, 0.0]]), 0.0).unwrap(), (0.0, 1.0));
        let (x0, l) = alpha_trace_on_beta_plane(&span(&[[1.0, 5.0, 0.0, 0.0]]), 7.0).unwrap();
        assert!((x0 - 5.0).abs() < 1e-15 && l == 0.0);
        assert!(matches!(
            alpha_trace_on_beta_plane(&span(&[[1.0, 0.0, 1.0, 0.0]]), 2.0),
            Err(Error::NotIncident { .. })
        ));
        assert!(matches!(
            alpha_trace_on_beta_plane(&span(&[[0.0, 1.0, 1.0, 0.0]]), 0.0),
            Err(Error::TangentDirection { .. })
        ));
    }

    #[test]
    fn beta_trace_is_polarity_mirror_of_alpha_trace() {
        let v3 = null_polarity(&span(&[[1.0, 0.0, -1.0, 0.0]])).unwrap();
        let (y0, m) = beta_trace_on_alpha_plane(&v3, 0.0).unwrap();
        assert!(y0.abs() < 1e-15 && (m - 1.0).abs() < 1e-15);
        let v3 = null_polarity(&span(&[[1.0, 5.0, 0.0, 0.0]])).unwrap();
        let (y0, m) = beta_trace_on_alpha_plane(&v3, 7.0).unwrap();
        assert!((y0 - 5.0).abs() < 1e-14 && m.abs() < 1e-15);
    }

    #[test]
    fn beta_trace_rejects_tangent_hyperplane() {
        // omega4 = 0: the excluded direction.
        let v3 = hyperplane([0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(beta_trace_on_alpha_plane(&v3, 0.0), Err(Error::TangentDirection { .. })));
    }

    #[test]
    fn flag_from_slopes_origin() {
        let f = flag_from_slopes(&scri_point(0.0, 0.0, 0.0), 0.0, 0.0).unwrap();
        assert_eq!(f.v1(), &span(&[E1]));
        assert_eq!(alpha_trace_on_beta_plane(f.v1(), 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn chart_line_of_a_simple_flag() {
        let p = scri_point(0.0, 0.0, 0.0);
        let flag = flag_from_slopes(&p, 1.0, 1.0).unwrap();
        let line = geodesic_chart_line(&flag).unwrap();
        assert!(quadratic_form(&line.direction).abs() < 1e-15);
        for t in [-2.0, 0.0, 0.5, 3.0] {
            let plane = line.at(t).plane();
            assert!(contains(&plane, flag.v1()));
            assert!(contains(flag.v3(), &plane));
        }
        let back = flag_from_chart_line(&line).unwrap();
        assert_eq!(back.v1(), flag.v1());
    }

    #[test]
    fn chart_line_needs_a_finite_geodesic() {
        let f = flag_from_slopes(&scri_point(0.0, 0.0, 0.0), 0.0, 0.0).unwrap();
        assert_eq!(geodesic_chart_line(&f), Err(Error::NoChartIntersection));
    }
}
