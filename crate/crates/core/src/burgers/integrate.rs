//! Fixed-step classical Runge–Kutta for the characteristic system
//! `z' = p, p' = σ(u, z, p)`.

use super::forcing::Forcing;
use crate::error::{Error, Result};

/// A point `(u, z, p)` of the characteristic phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharState {
    pub u: f64,
    pub x: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Integrator {
    /// Largest step in `u`; each leg is split into equal steps no longer than this.
    pub step: f64,
    /// Hard bound on `|x|` and `|p|`.
    pub bound: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        Self { step: 1e-3, bound: 1e6 }
    }
}

#[inline]
fn rk4(f: &Forcing, s: CharState, h: f64) -> CharState {
    let CharState { u, x, p } = s;
    let k1x = p;
    let k1p = f.sigma(u, x, p);
    let k2x = p + 0.5 * h * k1p;
    let k2p = f.sigma(u + 0.5 * h, x + 0.5 * h * k1x, k2x);
    let k3x = p + 0.5 * h * k2p;
    let k3p = f.sigma(u + 0.5 * h, x + 0.5 * h * k2x, k3x);
    let k4x = p + h * k3p;
    let k4p = f.sigma(u + h, x + h * k3x, k4x);
    CharState {
        u: u + h,
        x: x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        p: p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    }
}

impl Integrator {
    fn legs(&self, du: f64) -> usize {
        ((du.abs() / self.step).ceil() as usize).max(1)
    }

    fn check(&self, s: &CharState) -> Result<()> {
        if s.x.abs() > self.bound || s.p.abs() > self.bound || !s.x.is_finite() || !s.p.is_finite() {
            Err(Error::BlowUp { u: s.u, bound: self.bound })
        } else {
            Ok(())
        }
    }

    /// End state at `u_end`. Straight lines are propagated in closed form.
    pub fn propagate(&self, f: &Forcing, start: CharState, u_end: f64) -> Result<CharState> {
        let du = u_end - start.u;
        if du == 0.0 {
            return Ok(start);
        }
        if f.is_zero() {
            let s = CharState { u: u_end, x: start.x + start.p * du, p: start.p };
            self.check(&s)?;
            return Ok(s);
        }
        let n = self.legs(du);
        let h = du / n as f64;
        let mut s = start;
        for i in 0..n {
            s = rk4(f, s, h);
            if i + 1 == n {
                s.u = u_end;
            }
            self.check(&s)?;
        }
        Ok(s)
    }

    /// Every intermediate state from `start` to `u_end`.
    pub fn trace(&self, f: &Forcing, start: CharState, u_end: f64) -> Result<Vec<CharState>> {
        let du = u_end - start.u;
        let n = if du == 0.0 { 0 } else { self.legs(du) };
        let h = if n == 0 { 0.0 } else { du / n as f64 };
        let mut out = Vec::with_capacity(n + 1);
        let mut s = start;
        out.push(s);
        for i in 0..n {
            s = if f.is_zero() {
                let u = start.u + h * (i + 1) as f64;
                CharState { u, x: start.x + start.p * (u - start.u), p: start.p }
            } else {
                rk4(f, s, h)
            };
            if i + 1 == n {
                s.u = u_end;
            }
            self.check(&s)?;
            out.push(s);
        }
        Ok(out)
    }
}

/// Traces the characteristic of `x'' = σ(u, x, x')` through `(u0, x0, p0)` up to `u_end`.
pub fn characteristic_trace(
    f: &Forcing,
    u0: f64,
    x0: f64,
    p0: f64,
    u_end: f64,
    step: f64,
) -> Result<Vec<CharState>> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    Integrator { step, ..Integrator::default() }.trace(f, CharState { u: u0, x: x0, p: p0 }, u_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_without_forcing() {
        let tr = characteristic_trace(&Forcing::zero(), 0.0, 0.0, 1.0, 2.0, 1e-3).unwrap();
        let last = tr.last().unwrap();
        assert_eq!((last.u, last.x, last.p), (2.0, 2.0, 1.0));
        assert_eq!(tr.len(), 2001);
    }

    #[test]
    fn constant_forcing_matches_parabola() {
        let g = 0.7;
        let tr = characteristic_trace(&Forcing::constant(g), 0.0, 0.3, -0.4, 1.5, 1e-3).unwrap();
        for s in tr {
            let x = 0.3 - 0.4 * s.u + 0.5 * g * s.u * s.u;
            assert!((s.x - x).abs() < 1e-10);
            assert!((s.p - (-0.4 + g * s.u)).abs() < 1e-10);
        }
    }

    #[test]
    fn cubic_forcing_blows_up() {
        // p' = p³ with p(0) = 1 escapes at u = 1/2.
        let f = Forcing::cubic([0.0, 0.0, 0.0, 1.0]);
        let err = characteristic_trace(&f, 0.0, 0.0, 1.0, 1.0, 1e-4).unwrap_err();
        match err {
            Error::BlowUp { u, .. } => assert!((u - 0.5).abs() < 0.01, "escaped at {u}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn backwards_integration() {
        let f = Forcing::constant(1.0);
        let s = Integrator::default().propagate(&f, CharState { u: 1.0, x: 0.5, p: 1.0 }, 0.0).unwrap();
        // x = 0.5 + (u-1) + (u-1)²/2 at u = 0.
        assert!((s.x - 0.0).abs() < 1e-12 && s.p.abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_step() {
        assert!(characteristic_trace(&Forcing::zero(), 0.0, 0.0, 0.0, 1.0, 0.0).is_err());
    }
}
