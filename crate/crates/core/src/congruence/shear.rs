use rayon::prelude::*;

use super::family::{outer, pivot, split_at, transpose, Congruence, GeodesicFamily};
use super::scattering::ScriBox;
use crate::error::{Error, Result};
use crate::klein::chart_metric;
use crate::linalg::{solve4, wedge3_norm};

fn perp(a: &[f64; 2]) -> [f64; 2] {
    [-a[1], a[0]]
}

/// The null frame `k = s tᵀ`, `m = s (t⊥)ᵀ`, `m′ = (s⊥) tᵀ` read off at a fixed pivot entry.
fn frame(n: &[f64; 4], p: usize) -> ([f64; 4], [f64; 4]) {
    let (s, t) = split_at(n, p);
    (outer(&s, &perp(&t)), outer(&perp(&s), &t))
}

/// A line of a family together with first derivatives, in the parameters
/// `(u, x, y)`, of its origin, its direction and its null frame.
///
/// Directions at neighbouring labels are scaled to agree with the centre at
/// the centre's pivot entry, so the differences see a smooth field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineJet {
    pub origin: [f64; 4],
    pub k: [f64; 4],
    pub m: [f64; 4],
    pub m_prime: [f64; 4],
    pub d_origin: [[f64; 4]; 3],
    pub d_k: [[f64; 4]; 3],
    pub d_m: [[f64; 4]; 3],
    pub d_m_prime: [[f64; 4]; 3],
}

impl LineJet {
    pub fn new(family: &dyn GeodesicFamily, p: [f64; 3], h: f64) -> Result<Self> {
        let centre = family.line(p[0], p[1], p[2])?;
        let k = centre.direction;
        let pv = pivot(&k);
        let (m, m_prime) = frame(&k, pv);
        let sample = |a: usize, d: f64| -> Result<[[f64; 4]; 4]> {
            let mut q = p;
            q[a] += d;
            let line = family.line(q[0], q[1], q[2])?;
            let lead = line.direction[pv];
            if !(lead.abs() > 1e-3) {
                return Err(Error::IllConditioned(format!("direction gauge degenerates near {p:?}")));
            }
            let n = line.direction.map(|c| c / lead);
            let (fm, fmp) = frame(&n, pv);
            Ok([line.origin.to_vec(), n, fm, fmp])
        };
        let mut d = [[[0.0; 4]; 3]; 4];
        for a in 0..3 {
            let (p1, m1, p2, m2) = (sample(a, h)?, sample(a, -h)?, sample(a, 0.5 * h)?, sample(a, -0.5 * h)?);
            for f in 0..4 {
                for i in 0..4 {
                    let coarse = (p1[f][i] - m1[f][i]) / (2.0 * h);
                    let fine = (p2[f][i] - m2[f][i]) / h;
                    d[f][a][i] = (4.0 * fine - coarse) / 3.0;
                }
            }
        }
        Ok(Self {
            origin: centre.origin.to_vec(),
            k,
            m,
            m_prime,
            d_origin: d[0],
            d_k: d[1],
            d_m: d[2],
            d_m_prime: d[3],
        })
    }

    /// Columns `∂Phi/∂u, ∂Phi/∂x, ∂Phi/∂y, ∂Phi/∂t` at parameter `t`.
    pub fn jacobian(&self, t: f64) -> [[f64; 4]; 4] {
        let mut cols = [self.k; 4];
        for a in 0..3 {
            cols[a] = [0, 1, 2, 3].map(|i| self.d_origin[a][i] + t * self.d_k[a][i]);
        }
        cols
    }
}

/// Directional derivative along `v` of a field constant along each line,
/// given its parameter derivatives and the inverse Jacobian.
fn along(d: &[[f64; 4]; 3], jt: &[[f64; 4]; 4], v: &[f64; 4]) -> Result<[f64; 4]> {
    let c = solve4(jt, v, 1e-12).ok_or_else(|| Error::IllConditioned("singular Jacobian of Phi".into()))?;
    Ok([0, 1, 2, 3].map(|i| (0..3).map(|a| d[a][i] * c[a]).sum()))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShearSample {
    pub u: f64,
    pub x: f64,
    pub y: f64,
    pub t: f64,
    /// `g(∇_m k, m)` and `g(∇_m′ k, m′)`.
    pub shear: [f64; 2],
    pub shear_norm: f64,
    /// `|[k, m] ∧ k ∧ m|` and `|[k, m′] ∧ k ∧ m′|`.
    pub frobenius: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShearReport {
    pub h: f64,
    pub samples: Vec<ShearSample>,
    pub max_shear: f64,
    pub max_frobenius: [f64; 2],
}

fn scalars(jet: &LineJet, t: f64, metric_scale: f64) -> Result<([f64; 2], [f64; 2])> {
    let jt = transpose(&jet.jacobian(t));
    let mut shear = [0.0; 2];
    let mut frob = [0.0; 2];
    for (i, (m, dm)) in [(jet.m, &jet.d_m), (jet.m_prime, &jet.d_m_prime)].into_iter().enumerate() {
        let dk_m = along(&jet.d_k, &jt, &m)?;
        let dm_k = along(dm, &jt, &jet.k)?;
        shear[i] = metric_scale * chart_metric(&dk_m, &m);
        let bracket = [0, 1, 2, 3].map(|j| dm_k[j] - dk_m[j]);
        frob[i] = wedge3_norm(&bracket, &jet.k, &m);
    }
    Ok((shear, frob))
}

/// Shear scalars and Frobenius norms at every point of `grid` × `t`, with the
/// chart quadratic form multiplied by `metric_scale`.
pub fn shear_report_scaled(c: &Congruence, grid: &ScriBox, t: &[f64], h: f64, metric_scale: f64) -> Result<ShearReport> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("difference step must be positive, got {h}")));
    }
    let rows = grid
        .points()
        .into_par_iter()
        .map(|p| {
            let jet = LineJet::new(c.family.as_ref(), p, h)?;
            t.iter()
                .map(|&t| {
                    let (shear, frobenius) = scalars(&jet, t, metric_scale)?;
                    Ok(ShearSample {
                        u: p[0],
                        x: p[1],
                        y: p[2],
                        t,
                        shear,
                        shear_norm: shear[0].hypot(shear[1]),
                        frobenius,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<ShearSample> = rows.into_iter().flatten().collect();
    let max_shear = samples.iter().map(|s| s.shear_norm).fold(0.0, f64::max);
    let max_frobenius = samples
        .iter()
        .fold([0.0_f64; 2], |m, s| [m[0].max(s.frobenius[0]), m[1].max(s.frobenius[1])]);
    Ok(ShearReport { h, samples, max_shear, max_frobenius })
}

pub fn shear_report(c: &Congruence, grid: &ScriBox, t: &[f64], h: f64) -> Result<ShearReport> {
    shear_report_scaled(c, grid, t, h, 1.0)
}

/// Largest `|Σ|` and `|Σ′|` over `grid` × `t`.
pub fn frobenius_check(c: &Congruence, grid: &ScriBox, t: &[f64], h: f64) -> Result<[f64; 2]> {
    Ok(shear_report(c, grid, t, h)?.max_frobenius)
}
