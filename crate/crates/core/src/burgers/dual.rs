//! Numeric extraction of the dual second-order ODE.
//!
//! A second-order ODE `x'' = σ(u, x, x')` has a two-parameter family of
//! solutions `x(u; a, b)`, with `(a, b)` the position and slope at a fixed
//! basepoint. The incidence `x(u; a, b) = x` can be read either way: fixing
//! `(a, b)` gives a solution curve in `(u, x)`, fixing `(u, x)` gives a curve
//! `b(a)` in parameter space. The second derivative of the latter is the dual
//! forcing, sampled here by finite differences.

use rayon::prelude::*;

use super::forcing::Forcing;
use super::integrate::{CharState, Integrator};
use crate::error::{Error, Result};

/// Which side of an incidence relation is being resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Fix the parameters, move along a solution curve.
    Dynamical,
    /// Fix a point, move along the curve of parameters incident to it.
    Parameters,
}

/// A two-sided incidence between points `(u, x)` and parameters `(a, b)`.
pub trait Incidence: Sync {
    /// With `fixed` a point of the other side, returns the second coordinate
    /// of the incident point on `side` whose first coordinate is `first`.
    fn resolve(&self, side: Side, fixed: (f64, f64), first: f64) -> Result<f64>;
}

/// The same relation with the two sides exchanged.
#[derive(Debug, Clone, Copy)]
pub struct Transposed<I>(pub I);

impl<I: Incidence> Incidence for Transposed<I> {
    fn resolve(&self, side: Side, fixed: (f64, f64), first: f64) -> Result<f64> {
        let other = match side {
            Side::Dynamical => Side::Parameters,
            Side::Parameters => Side::Dynamical,
        };
        self.0.resolve(other, fixed, first)
    }
}

/// The solution family of `x'' = σ(u, x, x')` in initial-value coordinates at `basepoint`.
#[derive(Debug, Clone)]
pub struct OdeIncidence {
    pub forcing: Forcing,
    pub basepoint: f64,
    pub integrator: Integrator,
}

impl OdeIncidence {
    pub fn new(forcing: Forcing, basepoint: f64) -> Self {
        Self { forcing, basepoint, integrator: Integrator::default() }
    }

    fn solution(&self, a: f64, b: f64, u: f64) -> Result<f64> {
        let start = CharState { u: self.basepoint, x: a, p: b };
        Ok(self.integrator.propagate(&self.forcing, start, u)?.x)
    }

    /// Slope `b` at the basepoint of the solution through `(u, x)` starting at height `a`.
    fn shoot(&self, u: f64, x: f64, a: f64) -> Result<f64> {
        let tau = u - self.basepoint;
        if tau.abs() < 1e-8 {
            return Err(Error::IllConditioned(format!("point at the basepoint u = {u}")));
        }
        let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
        let mut b0 = (x - a) / tau;
        let mut r0 = self.solution(a, b0, u)? - x;
        if r0.abs() <= tol {
            return Ok(b0);
        }
        let mut b1 = b0 + 1e-3;
        let mut r1 = self.solution(a, b1, u)? - x;
        for _ in 0..60 {
            if r1.abs() <= tol {
                return Ok(b1);
            }
            let slope = (r1 - r0) / (b1 - b0);
            if slope == 0.0 || !slope.is_finite() {
                break;
            }
            let b2 = b1 - r1 / slope;
            if b2 == b1 {
                return Ok(b1);
            }
            (b0, r0) = (b1, r1);
            b1 = b2;
            r1 = self.solution(a, b1, u)? - x;
        }
        Err(Error::IllConditioned(format!("no incident solution through ({u}, {x}) from a = {a}")))
    }
}

impl Incidence for OdeIncidence {
    fn resolve(&self, side: Side, fixed: (f64, f64), first: f64) -> Result<f64> {
        match side {
            Side::Dynamical => self.solution(fixed.0, fixed.1, first),
            Side::Parameters => self.shoot(fixed.0, fixed.1, first),
        }
    }
}

/// Points `(u, x)` and the parameters `a` at which the dual curves are sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct DualGrid {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub a: Vec<f64>,
}

impl DualGrid {
    /// Uniform nodes on each closed interval.
    pub fn uniform(u: (f64, f64, usize), x: (f64, f64, usize), a: (f64, f64, usize)) -> Self {
        let nodes = |(lo, hi, n): (f64, f64, usize)| -> Vec<f64> {
            match n {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
            }
        };
        Self { u: nodes(u), x: nodes(x), a: nodes(a) }
    }

    fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.u.len() * self.x.len() * self.a.len());
        for &u in &self.u {
            for &x in &self.x {
                for &a in &self.a {
                    out.push((u, x, a));
                }
            }
        }
        out
    }
}

/// `σ*(a, b, b') = b''` at one point of one dual curve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DualSample {
    pub u: f64,
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub b_prime: f64,
    pub b_second: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualOde {
    pub samples: Vec<DualSample>,
    pub h: f64,
}

impl DualOde {
    pub fn max_abs_second(&self) -> f64 {
        self.samples.iter().map(|s| s.b_second.abs()).fold(0.0, f64::max)
    }
}

/// Samples the second derivative of the curves on the parameter side of `inc`.
pub fn extract(inc: &impl Incidence, grid: &DualGrid, h: f64) -> Result<DualOde> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("difference step must be positive, got {h}")));
    }
    let samples = grid
        .points()
        .into_par_iter()
        .map(|(u, x, a)| {
            let at = |a| inc.resolve(Side::Parameters, (u, x), a);
            let (bm, b, bp) = (at(a - h)?, at(a)?, at(a + h)?);
            Ok(DualSample {
                u,
                x,
                a,
                b,
                b_prime: (bp - bm) / (2.0 * h),
                b_second: (bp - 2.0 * b + bm) / (h * h),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualOde { samples, h })
}

/// Dual forcing of `x'' = σ` sampled over `grid`, in initial-value
/// coordinates at `basepoint`. Default step `h = 1e-4`.
pub fn dual_ode_extract(f: &Forcing, basepoint: f64, grid: &DualGrid, h: f64) -> Result<DualOde> {
    extract(&OdeIncidence::new(f.clone(), basepoint), grid, h)
}
