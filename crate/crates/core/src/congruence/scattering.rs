use std::sync::Arc;

use rayon::prelude::*;

use crate::burgers::{transversality_check, BurgersSolution, CauchyCurve, Forcing, Integrator, Region};
use crate::error::{Error, LeafKind, Result};

/// A function of the two transverse coordinates `(x, y)` of scri.
pub type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Transversality margins at or below this are treated as tangent.
pub const TRANSVERSALITY_FLOOR: f64 = 1e-8;

/// Scattering data on a crossection `u = s(x, y)` of scri.
#[derive(Clone)]
pub struct ScatteringData {
    pub section: PlaneFn,
    pub l0: PlaneFn,
    pub m0: PlaneFn,
    /// Rectangle over which the data is sampled to seed characteristics.
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub samples: usize,
}

impl std::fmt::Debug for ScatteringData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScatteringData")
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .field("samples", &self.samples)
            .finish_non_exhaustive()
    }
}

impl ScatteringData {
    /// Data on the cut `u = 0`.
    pub fn on_cut(
        l0: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        m0: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        x_range: (f64, f64),
        y_range: (f64, f64),
        samples: usize,
    ) -> Self {
        Self { section: Arc::new(|_, _| 0.0), l0: Arc::new(l0), m0: Arc::new(m0), x_range, y_range, samples }
    }

    /// Cauchy data for `L` on the beta-plane `{y = y0}`, parametrized by `x`.
    pub fn beta_curve(&self, y0: f64) -> Result<CauchyCurve> {
        let (s, l0) = (self.section.clone(), self.l0.clone());
        CauchyCurve::new(Arc::new(move |x| (s(x, y0), x)), Arc::new(move |x| l0(x, y0)), self.x_range, self.samples)
    }

    /// Cauchy data for `M` on the alpha-plane `{x = x0}`, parametrized by `y`.
    pub fn alpha_curve(&self, x0: f64) -> Result<CauchyCurve> {
        let (s, m0) = (self.section.clone(), self.m0.clone());
        CauchyCurve::new(Arc::new(move |y| (s(x0, y), y)), Arc::new(move |y| m0(x0, y)), self.y_range, self.samples)
    }
}

/// A box in the `(u, x, y)` chart of scri with a sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScriBox {
    pub u: (f64, f64),
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub n: [usize; 3],
}

impl ScriBox {
    fn range(&self, axis: usize) -> (f64, f64) {
        [self.u, self.x, self.y][axis]
    }

    /// Uniform nodes along axis 0 (`u`), 1 (`x`) or 2 (`y`), endpoints included.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        let (lo, hi) = self.range(axis);
        match self.n[axis] {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            n => (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
        }
    }

    /// Grid points in `u`-major, then `x`, then `y` order.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let (us, xs, ys) = (self.axis(0), self.axis(1), self.axis(2));
        let mut out = Vec::with_capacity(us.len() * xs.len() * ys.len());
        for &u in &us {
            for &x in &xs {
                for &y in &ys {
                    out.push([u, x, y]);
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KappaSample {
    pub u: f64,
    pub x: f64,
    pub y: f64,
    pub l: f64,
    pub m: f64,
}

/// Largest per-slice residuals of both Burgers equations over the domain grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SliceResiduals {
    pub l: f64,
    pub m: f64,
}

/// The pair `(L, M)` on a box of scri: `L` solves the forced Burgers equation
/// in `(u, x)` on every beta-plane, `M` in `(u, y)` on every alpha-plane.
#[derive(Debug, Clone)]
pub struct KappaField {
    pub data: ScatteringData,
    pub sigma: Forcing,
    pub sigma_tilde: Forcing,
    pub domain: ScriBox,
    pub integrator: Integrator,
    /// `L` and `M` at [`ScriBox::points`].
    pub samples: Vec<KappaSample>,
}

fn on_slice(e: Error, kind: LeafKind, at: f64) -> Error {
    match e {
        Error::CausticReached { u, x, slice: None } => Error::CausticReached { u, x, slice: Some((kind, at)) },
        Error::TransversalityViolation { margin, slice: None } => {
            Error::TransversalityViolation { margin, slice: Some((kind, at)) }
        }
        e => e,
    }
}

impl KappaField {
    pub fn l_leaf(&self, y0: f64) -> Result<BurgersSolution> {
        leaf(&self.data, &self.sigma, self.integrator, LeafKind::Beta, y0)
    }

    pub fn m_leaf(&self, x0: f64) -> Result<BurgersSolution> {
        leaf(&self.data, &self.sigma_tilde, self.integrator, LeafKind::Alpha, x0)
    }

    pub fn l(&self, u: f64, x: f64, y: f64) -> Result<f64> {
        self.l_leaf(y)?.eval(u, x).map_err(|e| on_slice(e, LeafKind::Beta, y))
    }

    pub fn m(&self, u: f64, x: f64, y: f64) -> Result<f64> {
        self.m_leaf(x)?.eval(u, y).map_err(|e| on_slice(e, LeafKind::Alpha, x))
    }

    pub fn slopes(&self, u: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        Ok((self.l(u, x, y)?, self.m(u, x, y)?))
    }

    /// Central-difference residuals at step `h` on every slice through the domain grid.
    pub fn residuals(&self, h: f64) -> Result<SliceResiduals> {
        let (us, xs, ys) = (self.domain.axis(0), self.domain.axis(1), self.domain.axis(2));
        let l = ys
            .par_iter()
            .map(|&y| slice_residual(&self.l_leaf(y)?, &us, &xs, h).map_err(|e| on_slice(e, LeafKind::Beta, y)))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        let m = xs
            .par_iter()
            .map(|&x| slice_residual(&self.m_leaf(x)?, &us, &ys, h).map_err(|e| on_slice(e, LeafKind::Alpha, x)))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        Ok(SliceResiduals { l, m })
    }

    pub fn is_flat(&self) -> bool {
        self.sigma.is_zero() && self.sigma_tilde.is_zero()
    }
}

fn leaf(data: &ScatteringData, f: &Forcing, integrator: Integrator, kind: LeafKind, at: f64) -> Result<BurgersSolution> {
    let curve = match kind {
        LeafKind::Beta => data.beta_curve(at)?,
        LeafKind::Alpha => data.alpha_curve(at)?,
    };
    Ok(BurgersSolution::new(f.on_leaf(at), curve).with_integrator(integrator))
}

fn slice_residual(sol: &BurgersSolution, us: &[f64], zs: &[f64], h: f64) -> Result<f64> {
    let shifted: Vec<f64> = zs.iter().flat_map(|&z| [z - h, z, z + h]).collect();
    let mut worst: f64 = 0.0;
    for &u in us {
        let mid = sol.eval_level(u, &shifted)?;
        let lo = sol.eval_level(u - h, zs)?;
        let hi = sol.eval_level(u + h, zs)?;
        for (j, &z) in zs.iter().enumerate() {
            let l = mid[3 * j + 1];
            let lu = (hi[j] - lo[j]) / (2.0 * h);
            let lz = (mid[3 * j + 2] - mid[3 * j]) / (2.0 * h);
            worst = worst.max((lu + l * lz - sol.forcing.sigma(u, z, l)).abs());
        }
    }
    Ok(worst)
}

fn check_leaf(sol: &BurgersSolution, kind: LeafKind, at: f64, u: (f64, f64)) -> Result<()> {
    let margin = transversality_check(&sol.cauchy)?;
    if !(margin > TRANSVERSALITY_FLOOR) {
        return Err(Error::TransversalityViolation { margin, slice: Some((kind, at)) });
    }
    let region = Region { u_min: u.0, u_max: u.1, steps: 64 };
    if let Some(c) = sol.caustic_detect(region).map_err(|e| on_slice(e, kind, at))? {
        return Err(Error::CausticReached { u: c.u, x: c.x, slice: Some((kind, at)) });
    }
    Ok(())
}

/// Solves the Burgers pair with forcings `f` (for `L`) and `ftilde` (for `M`)
/// slice by slice over `domain`, after checking that every slice through the
/// grid has transverse Cauchy data and no caustic in the `u`-range.
pub fn solve_scattering(data: &ScatteringData, f: &Forcing, ftilde: &Forcing, domain: ScriBox) -> Result<KappaField> {
    solve_scattering_with(data, f, ftilde, domain, Integrator::default())
}

pub fn solve_scattering_with(
    data: &ScatteringData,
    f: &Forcing,
    ftilde: &Forcing,
    domain: ScriBox,
    integrator: Integrator,
) -> Result<KappaField> {
    let (us, xs, ys) = (domain.axis(0), domain.axis(1), domain.axis(2));
    let l_rows = ys
        .par_iter()
        .map(|&y| {
            let sol = leaf(data, f, integrator, LeafKind::Beta, y)?;
            check_leaf(&sol, LeafKind::Beta, y, domain.u)?;
            us.iter().map(|&u| sol.eval_level(u, &xs).map_err(|e| on_slice(e, LeafKind::Beta, y))).collect()
        })
        .collect::<Result<Vec<Vec<Vec<f64>>>>>()?;
    let m_rows = xs
        .par_iter()
        .map(|&x| {
            let sol = leaf(data, ftilde, integrator, LeafKind::Alpha, x)?;
            check_leaf(&sol, LeafKind::Alpha, x, domain.u)?;
            us.iter().map(|&u| sol.eval_level(u, &ys).map_err(|e| on_slice(e, LeafKind::Alpha, x))).collect()
        })
        .collect::<Result<Vec<Vec<Vec<f64>>>>>()?;
    let mut samples = Vec::with_capacity(domain.len());
    for (iu, &u) in us.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            for (iy, &y) in ys.iter().enumerate() {
                samples.push(KappaSample { u, x, y, l: l_rows[iy][iu][ix], m: m_rows[ix][iu][iy] });
            }
        }
    }
    Ok(KappaField {
        data: data.clone(),
        sigma: f.clone(),
        sigma_tilde: ftilde.clone(),
        domain,
        integrator,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_box(u: (f64, f64)) -> ScriBox {
        ScriBox { u, x: (-0.5, 0.5), y: (-0.5, 0.5), n: [3, 3, 3] }
    }

    #[test]
    fn zero_data_stays_zero() {
        let data = ScatteringData::on_cut(|_, _| 0.0, |_, _| 0.0, (-2.0, 2.0), (-2.0, 2.0), 41);
        let k = solve_scattering(&data, &Forcing::zero(), &Forcing::zero(), small_box((0.0, 0.5))).unwrap();
        assert!(k.samples.iter().all(|s| s.l == 0.0 && s.m == 0.0));
    }

    #[test]
    fn identity_data_per_beta_slice() {
        let data = ScatteringData::on_cut(|x, _| x, |_, _| 0.0, (-3.0, 3.0), (-3.0, 3.0), 61);
        let k = solve_scattering(&data, &Forcing::zero(), &Forcing::zero(), small_box((0.0, 0.9))).unwrap();
        for s in &k.samples {
            assert!((s.l - s.x / (1.0 + s.u)).abs() < 1e-12);
            assert_eq!(s.m, 0.0);
        }
        let r = k.residuals(1e-3).unwrap();
        // Truncation error h²·x/(1 + u)⁴ of the central differences.
        assert!(r.l < 1e-6 && r.m == 0.0, "{r:?}");
    }

    #[test]
    fn compressive_data_reports_the_slice() {
        let data = ScatteringData::on_cut(|x, _| -x, |_, _| 0.0, (-3.0, 3.0), (-3.0, 3.0), 61);
        match solve_scattering(&data, &Forcing::zero(), &Forcing::zero(), small_box((0.0, 1.5))) {
            Err(Error::CausticReached { u, slice: Some((LeafKind::Beta, _)), .. }) => assert!((u - 1.0).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tangent_data_is_rejected() {
        // The Cauchy curve u = x on each beta-plane is itself a characteristic for L0 = 1.
        let data = ScatteringData {
            section: Arc::new(|x, _| x),
            ..ScatteringData::on_cut(|_, _| 1.0, |_, _| 0.0, (-1.0, 1.0), (-1.0, 1.0), 21)
        };
        assert!(matches!(
            solve_scattering(&data, &Forcing::zero(), &Forcing::zero(), small_box((0.0, 0.1))),
            Err(Error::TransversalityViolation { slice: Some((LeafKind::Beta, _)), .. })
        ));
    }
}
