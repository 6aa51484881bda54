//! Cauchy problem for `L_u + L·L_x = σ(u, x, L)` by the method of characteristics.
//!
//! Every characteristic starts at a point `γ(s)` of the Cauchy curve with
//! slope `L_γ(s)`. To evaluate the solution at `(u, x)` the sample
//! characteristics are propagated to level `u`, the bracket containing `x` is
//! located, and the foot parameter `s` is refined by bracketed root finding.
//! The flat equation is the special case `σ ≡ 0` with `γ(s) = (0, s)`.

use std::sync::Arc;

use super::forcing::Forcing;
use super::integrate::{CharState, Integrator};
use super::roots::refine_root;
use crate::error::{Error, Result};

pub type CurveFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An embedded curve `s ↦ (u(s), x(s))` carrying slope data `L_γ(s)`.
///
/// The curve must be oriented so that `x` increases with `s` along the
/// characteristics it launches.
#[derive(Clone)]
pub struct CauchyCurve {
    gamma: CurveFn,
    slope: ScalarFn,
    range: (f64, f64),
    samples: usize,
}

impl std::fmt::Debug for CauchyCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CauchyCurve")
            .field("range", &self.range)
            .field("samples", &self.samples)
            .finish_non_exhaustive()
    }
}

impl CauchyCurve {
    pub fn new(gamma: CurveFn, slope: ScalarFn, range: (f64, f64), samples: usize) -> Result<Self> {
        if samples < 2 || !(range.1 > range.0) {
            return Err(Error::InvalidArgument("Cauchy curve needs two samples and an ordered range".into()));
        }
        let c = Self { gamma, slope, range, samples };
        let pts: Vec<_> = c.params().map(|s| (c.gamma)(s)).collect();
        for (i, w) in pts.windows(2).enumerate() {
            let d = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
            if !(d > 1e-14) {
                return Err(Error::DegenerateCurve { index: i + 1 });
            }
        }
        Ok(c)
    }

    /// Initial data on the line `u = 0`, parametrized by `x` itself.
    pub fn initial_line(
        initial: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x_range: (f64, f64),
        samples: usize,
    ) -> Result<Self> {
        Self::new(Arc::new(|s| (0.0, s)), Arc::new(initial), x_range, samples)
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = self.range;
        let n = self.samples - 1;
        (0..=n).map(move |i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
    }

    pub fn point(&self, s: f64) -> (f64, f64) {
        (self.gamma)(s)
    }

    pub fn slope(&self, s: f64) -> f64 {
        (self.slope)(s)
    }

    fn start(&self, s: f64) -> CharState {
        let (u, x) = (self.gamma)(s);
        CharState { u, x, p: (self.slope)(s) }
    }
}

/// Minimum over samples of the sine of the angle between the curve tangent and
/// the datum direction `(1, L_γ)`. Positive margin certifies local solvability.
pub fn transversality_check(c: &CauchyCurve) -> Result<f64> {
    let h = 1e-4 * (c.range.1 - c.range.0);
    let mut margin = f64::INFINITY;
    for (i, s) in c.params().enumerate() {
        let d = |h: f64| {
            let (u1, x1) = c.point(s + h);
            let (u0, x0) = c.point(s - h);
            ((u1 - u0) / (2.0 * h), (x1 - x0) / (2.0 * h))
        };
        let (a, b) = (d(h), d(0.5 * h));
        let du = (4.0 * b.0 - a.0) / 3.0;
        let dx = (4.0 * b.1 - a.1) / 3.0;
        let tn = du.hypot(dx);
        if !(tn > 1e-12) {
            return Err(Error::DegenerateCurve { index: i });
        }
        let l = c.slope(s);
        let m = (du * l - dx).abs() / (tn * l.hypot(1.0));
        margin = margin.min(m);
    }
    Ok(margin)
}

/// A Burgers' function determined by forcing and Cauchy data.
#[derive(Clone, Debug)]
pub struct BurgersSolution {
    pub forcing: Forcing,
    pub cauchy: CauchyCurve,
    pub integrator: Integrator,
}

/// The sample characteristics at a common level `u`, ordered in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub u: f64,
    params: Vec<f64>,
    states: Vec<CharState>,
}

/// First point where neighbouring characteristics cross.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CausticPoint {
    pub u: f64,
    pub x: f64,
    pub p: f64,
    /// Index of the first sample of the crossing pair.
    pub pair: usize,
}

/// The `u`-interval scanned for caustics and its sampling.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Region {
    pub u_min: f64,
    pub u_max: f64,
    pub steps: usize,
}

const CAUSTIC_U_TOL: f64 = 1e-8;

impl BurgersSolution {
    pub fn new(forcing: Forcing, cauchy: CauchyCurve) -> Self {
        Self { forcing, cauchy, integrator: Integrator::default() }
    }

    /// Flat solution with data `L0` on `u = 0`, sampled over `x_range`.
    pub fn flat(
        initial: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x_range: (f64, f64),
        samples: usize,
    ) -> Result<Self> {
        Ok(Self::new(Forcing::zero(), CauchyCurve::initial_line(initial, x_range, samples)?))
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    /// State `(u, x(s, u), p(s, u))` of the characteristic launched at `γ(s)`.
    pub fn charmap(&self, s: f64, u: f64) -> Result<CharState> {
        self.integrator.propagate(&self.forcing, self.cauchy.start(s), u)
    }

    /// Every sample characteristic propagated to level `u`.
    pub fn level(&self, u: f64) -> Result<Level> {
        let params: Vec<f64> = self.cauchy.params().collect();
        let states = params.iter().map(|&s| self.charmap(s, u)).collect::<Result<Vec<_>>>()?;
        if states.windows(2).any(|w| !(w[1].x > w[0].x)) {
            return Err(Error::CausticReached { u, x: f64::NAN, slice: None });
        }
        Ok(Level { u, params, states })
    }

    /// Foot parameter `s` of the characteristic through `(u, x)` and its state there.
    pub fn foot(&self, u: f64, x: f64) -> Result<(f64, CharState)> {
        let level = self.level(u).map_err(|e| match e {
            Error::CausticReached { u, slice, .. } => Error::CausticReached { u, x, slice },
            e => e,
        })?;
        self.foot_on(&level, x)
    }

    /// As [`foot`](Self::foot), reusing a propagated level.
    pub fn foot_on(&self, level: &Level, x: f64) -> Result<(f64, CharState)> {
        let (u, params, states) = (level.u, &level.params, &level.states);
        let first = states[0].x;
        let last = states[states.len() - 1].x;
        if !(x >= first && x <= last) {
            return Err(Error::NotCovered { u, x });
        }
        let i = states.partition_point(|st| st.x <= x).clamp(1, states.len() - 1) - 1;
        let (a, b) = (params[i], params[i + 1]);
        let s = refine_root(|s| Ok::<_, Error>(self.charmap(s, u)?.x - x), a, b, states[i].x - x, states[i + 1].x - x)?;
        Ok((s, self.charmap(s, u)?))
    }

    /// `L` at every `x` of one level.
    pub fn eval_level(&self, u: f64, xs: &[f64]) -> Result<Vec<f64>> {
        let level = self.level(u)?;
        xs.iter().map(|&x| Ok(self.foot_on(&level, x)?.1.p)).collect()
    }

    pub fn eval(&self, u: f64, x: f64) -> Result<f64> {
        Ok(self.foot(u, x)?.1.p)
    }

    /// The `x`-coordinate of the foot point on the Cauchy curve.
    pub fn transport(&self, u: f64, x: f64) -> Result<f64> {
        let (s, _) = self.foot(u, x)?;
        Ok(self.cauchy.point(s).1)
    }

    /// Central-difference residual `L_u + L·L_x − σ(u, x, L)` at step `h`.
    pub fn residual(&self, u: f64, x: f64, h: f64) -> Result<f64> {
        let l = self.eval(u, x)?;
        let lu = (self.eval(u + h, x)? - self.eval(u - h, x)?) / (2.0 * h);
        let lx = (self.eval(u, x + h)? - self.eval(u, x - h)?) / (2.0 * h);
        Ok(lu + l * lx - self.forcing.sigma(u, x, l))
    }

    /// Earliest crossing of neighbouring sample characteristics in `region`.
    pub fn caustic_detect(&self, region: Region) -> Result<Option<CausticPoint>> {
        Ok(self
            .crossings(region)?
            .into_iter()
            .min_by(|a, b| a.u.total_cmp(&b.u)))
    }

    /// First crossing of every neighbouring pair that crosses in `region`:
    /// samples of the caustic as `(u, x, p)`.
    pub fn caustic_envelope(&self, region: Region) -> Result<Vec<CausticPoint>> {
        let mut pts = self.crossings(region)?;
        pts.sort_by_key(|c| c.pair);
        Ok(pts)
    }

    fn crossings(&self, region: Region) -> Result<Vec<CausticPoint>> {
        if region.steps == 0 || !(region.u_max >= region.u_min) {
            return Err(Error::InvalidArgument("caustic region needs steps > 0 and u_max >= u_min".into()));
        }
        let params: Vec<f64> = self.cauchy.params().collect();
        let mut states = params.iter().map(|&s| self.charmap(s, region.u_min)).collect::<Result<Vec<_>>>()?;
        let mut found: Vec<Option<CausticPoint>> = vec![None; params.len() - 1];
        for (i, w) in states.windows(2).enumerate() {
            if w[1].x - w[0].x <= 0.0 {
                found[i] = Some(crossing_point(region.u_min, &w[0], &w[1], i));
            }
        }
        let du = (region.u_max - region.u_min) / region.steps as f64;
        for k in 1..=region.steps {
            let u = if k == region.steps { region.u_max } else { region.u_min + du * k as f64 };
            let next = states
                .iter()
                .map(|st| self.integrator.propagate(&self.forcing, *st, u))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..found.len() {
                if found[i].is_some() || next[i + 1].x - next[i].x > 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (states[i].u, u);
                let (a0, b0) = (states[i], states[i + 1]);
                let at = |v: f64| -> Result<(CharState, CharState)> {
                    Ok((
                        self.integrator.propagate(&self.forcing, a0, v)?,
                        self.integrator.propagate(&self.forcing, b0, v)?,
                    ))
                };
                while hi - lo > CAUSTIC_U_TOL {
                    let mid = 0.5 * (lo + hi);
                    let (a, b) = at(mid)?;
                    if b.x - a.x > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let mid = 0.5 * (lo + hi);
                let (a, b) = at(mid)?;
                found[i] = Some(crossing_point(mid, &a, &b, i));
            }
            states = next;
        }
        Ok(found.into_iter().flatten().collect())
    }
}

fn crossing_point(u: f64, a: &CharState, b: &CharState, pair: usize) -> CausticPoint {
    CausticPoint { u, x: 0.5 * (a.x + b.x), p: 0.5 * (a.p + b.p), pair }
}

/// `L(u, x)` for the flat equation.
pub fn eval_flat(sol: &BurgersSolution, u: f64, x: f64) -> Result<f64> {
    sol.eval(u, x)
}

/// Characteristic label `X(u, x)`, the solution of `X_u + L·X_x = 0`, `X(0, x) = x`.
pub fn transport_eval(sol: &BurgersSolution, u: f64, x: f64) -> Result<f64> {
    sol.transport(u, x)
}

/// `L(u, x)` for the forced equation with the given Cauchy data.
pub fn eval_forced(f: &Forcing, c: &CauchyCurve, u: f64, x: f64) -> Result<f64> {
    BurgersSolution::new(f.clone(), c.clone()).eval(u, x)
}

pub fn caustic_detect(sol: &BurgersSolution, region: Region) -> Result<Option<CausticPoint>> {
    sol.caustic_detect(region)
}
