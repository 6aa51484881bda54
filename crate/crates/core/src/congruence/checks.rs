use rayon::prelude::*;

use super::family::Congruence;
use super::scattering::KappaField;
use crate::error::Result;
use crate::klein::{
    alpha_trace_on_beta_plane, beta_trace_on_alpha_plane, flag_from_chart_line, flag_from_slopes,
    geodesic_chart_line, scri_intersection, scri_point,
};
use crate::linalg::numeric_rank;

/// Numeric ranks of the differentials of `κ₁ = (u, x, y) ↦ V₁` and `κ₃ = (u, x, y) ↦ V₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct KappaRanks {
    pub min_v1: usize,
    pub max_v1: usize,
    pub min_v3: usize,
    pub max_v3: usize,
}

fn richardson(f: &dyn Fn([f64; 3]) -> Result<[f64; 4]>, p: [f64; 3], a: usize, h: f64) -> Result<[f64; 4]> {
    let at = |d: f64| {
        let mut q = p;
        q[a] += d;
        f(q)
    };
    let (p1, m1, p2, m2) = (at(h)?, at(-h)?, at(0.5 * h)?, at(-0.5 * h)?);
    Ok([0, 1, 2, 3].map(|i| (4.0 * (p2[i] - m2[i]) / h - (p1[i] - m1[i]) / (2.0 * h)) / 3.0))
}

fn projective_rank(f: &dyn Fn([f64; 3]) -> Result<[f64; 4]>, p: [f64; 3], h: f64, tol: f64) -> Result<usize> {
    let rows = [f(p)?, richardson(f, p, 0, h)?, richardson(f, p, 1, h)?, richardson(f, p, 2, h)?];
    Ok(numeric_rank(&rows, tol) - 1)
}

/// Ranks at each of `points`, using affine representatives
/// `V₁ = (1, x − L·u, −L, −L·y)` and `V₃ = ker(−x·M, M, y − u·M, −1)`.
pub fn kappa_ranks(kappa: &KappaField, points: &[[f64; 3]], h: f64, tol: f64) -> Result<KappaRanks> {
    let v1 = |q: [f64; 3]| -> Result<[f64; 4]> {
        let l = kappa.l(q[0], q[1], q[2])?;
        Ok([1.0, q[1] - l * q[0], -l, -l * q[2]])
    };
    let v3 = |q: [f64; 3]| -> Result<[f64; 4]> {
        let m = kappa.m(q[0], q[1], q[2])?;
        Ok([-q[1] * m, m, q[2] - q[0] * m, -1.0])
    };
    let ranks = points
        .par_iter()
        .map(|&p| Ok((projective_rank(&v1, p, h, tol)?, projective_rank(&v3, p, h, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    let init = KappaRanks { min_v1: usize::MAX, max_v1: 0, min_v3: usize::MAX, max_v3: 0 };
    Ok(ranks.into_iter().fold(init, |r, (a, b)| KappaRanks {
        min_v1: r.min_v1.min(a),
        max_v1: r.max_v1.max(a),
        min_v3: r.min_v3.min(b),
        max_v3: r.max_v3.max(b),
    }))
}

/// Recovers the label and the slopes of each line from its chart points and
/// returns the largest discrepancy with the field.
pub fn round_trip_error(kappa: &KappaField) -> Result<f64> {
    kappa
        .samples
        .par_iter()
        .map(|s| {
            let line = geodesic_chart_line(&flag_from_slopes(&scri_point(s.u, s.x, s.y), s.l, s.m)?)?;
            let flag = flag_from_chart_line(&line)?;
            let p = scri_intersection(&flag)?;
            let (_, l) = alpha_trace_on_beta_plane(flag.v1(), p.y)?;
            let (_, m) = beta_trace_on_alpha_plane(flag.v3(), p.x)?;
            Ok([p.u - s.u, p.x - s.x, p.y - s.y, l - s.l, m - s.m].iter().fold(0.0_f64, |a, d| a.max(d.abs())))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Largest `|det k|` over the congruence's domain grid.
pub fn max_null_defect(c: &Congruence) -> Result<f64> {
    c.domain
        .points()
        .par_iter()
        .map(|&[u, x, y]| {
            let k = c.k(u, x, y)?;
            Ok((k[0] * k[3] - k[1] * k[2]).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
