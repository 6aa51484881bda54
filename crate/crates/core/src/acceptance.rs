//! The built-in acceptance suite run by `shearfree selftest`.
//!
//! Each criterion reports named measurements against limits. Two
//! sub-measurements are known to fail for structural reasons: the step-halving
//! ratios of schemes that are exact on the test problem (`forced_ratio` of
//! criterion 3 and `gravity_ratio` of criterion 6). Their errors sit at
//! roundoff, so the ratio is noise.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::burgers::{
    characteristic_trace, circle_tangent_lines, dual_circle, dual_ode_extract, eval_flat, projective_transversality,
    surface_from_caustic, BurgersSolution, CauchyCurve, Coefficient, DualGrid, Forcing, ProjectiveCauchyCurve, Region,
};
use crate::cli::Check;
use crate::congruence::{
    kappa_ranks, max_null_defect, round_trip_error, shear_report, solve_scattering, Congruence, KappaFamily, KappaField,
    ScatteringData, ScriBox, TwistedFamily,
};
use crate::error::{Error, Result};
use crate::klein::{flag_from_slopes, null_separation, plucker_embed, scri_intersection, scri_point};
use crate::projlin::{meet, span_canonical, HPoint, Subspace, DEFAULT_TOL};

/// Seed of every random sample drawn by the suite.
pub const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl Criterion {
    fn from_checks(id: u8, name: &'static str, checks: Result<Vec<Check>>) -> Self {
        match checks {
            Ok(checks) => Self { id, name, passed: checks.iter().all(|c| c.passed), checks, error: None },
            Err(e) => Self { id, name, passed: false, checks: Vec::new(), error: Some(e.to_string()) },
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `PASS`/`FAIL` followed by the id, the name and the failing checks.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{verdict} criterion {:>2}: {}", self.id, self.name);
        for c in self.checks.iter().filter(|c| !c.passed) {
            s += &format!(" [{} = {:e}, want {} {:e}]", c.name, c.value, c.relation, c.limit);
        }
        if let Some(e) = &self.error {
            s += &format!(" [error: {e}]");
        }
        s
    }
}

fn random_plane(rng: &mut ChaCha8Rng) -> Subspace<4> {
    loop {
        let rows = [[(); 4].map(|_| rng.gen_range(-1.0..1.0)), [(); 4].map(|_| rng.gen_range(-1.0..1.0))];
        if let Ok(p) = span_canonical(&rows, DEFAULT_TOL) {
            if p.dim() == 2 {
                return p;
            }
        }
    }
}

/// Random planes: Plücker relation, and null separation against meets.
pub fn plucker_suite() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        worst = worst.max(plucker_embed(&random_plane(&mut rng))?.relation_residual());
    }
    let mut disagreements = 0;
    for i in 0..10_000 {
        let a = random_plane(&mut rng);
        let b = if i % 2 == 0 {
            random_plane(&mut rng)
        } else {
            let shared = a.basis()[0].map(|v| v * rng.gen_range(0.5..2.0));
            let other = [(); 4].map(|_| rng.gen_range(-1.0..1.0));
            span_canonical(&[shared, other], DEFAULT_TOL)?
        };
        let zero = null_separation(&a, &b)?.abs() <= 1e-10;
        let meets = meet(&a, &b).dim() > 0;
        if zero != meets {
            disagreements += 1;
        }
    }
    Ok(vec![Check::at_most("max_relation_residual", worst, 1e-12), Check::equals("separation_meet_disagreements", disagreements as f64, 0.0)])
}

/// `L0 = x` against `x/(1+u)`, and constant data.
pub fn flat_closed_form() -> Result<Vec<Check>> {
    let sol = BurgersSolution::flat(|x| x, (-10.0, 10.0), 401)?;
    let xs: Vec<f64> = (0..=100).map(|j| -1.0 + 2.0 * j as f64 / 100.0).collect();
    let mut worst = 0.0_f64;
    for i in 0..=100 {
        let u = 0.9 * i as f64 / 100.0;
        for (x, l) in xs.iter().zip(sol.eval_level(u, &xs)?) {
            worst = worst.max((l - x / (1.0 + u)).abs());
        }
    }
    let c = 0.37;
    let constant = BurgersSolution::flat(move |_| c, (-10.0, 10.0), 401)?;
    let mut deviation = 0.0_f64;
    for i in 0..=10 {
        let u = 0.9 * i as f64 / 10.0;
        for l in constant.eval_level(u, &xs)? {
            deviation = deviation.max((l - c).abs());
        }
    }
    Ok(vec![Check::at_most("identity_max_error", worst, 1e-9), Check::equals("constant_max_deviation", deviation, 0.0)])
}

fn max_residual(sol: &BurgersSolution, h: f64) -> Result<f64> {
    let mut m = 0.0_f64;
    for i in 0..=10 {
        let u = 0.1 + 0.7 * i as f64 / 10.0;
        for j in 0..=10 {
            m = m.max(sol.residual(u, -1.0 + 0.2 * j as f64, h)?.abs());
        }
    }
    Ok(m)
}

fn halving_ratio(sol: &BurgersSolution) -> Result<f64> {
    let h = 1e-2;
    Ok(max_residual(sol, h)? / max_residual(sol, h / 2.0)?)
}

/// The central-difference residual is second order.
pub fn residual_convergence() -> Result<Vec<Check>> {
    let flat = BurgersSolution::flat(|x| x, (-10.0, 10.0), 401)?;
    let forced = BurgersSolution::new(Forcing::constant(0.5), CauchyCurve::initial_line(|_| 0.0, (-10.0, 10.0), 401)?);
    let (a, b) = (halving_ratio(&flat)?, halving_ratio(&forced)?);
    Ok(vec![
        Check::at_most("flat_ratio_deviation", (a / 4.0 - 1.0).abs(), 0.2),
        Check::at_most("forced_ratio_deviation", (b / 4.0 - 1.0).abs(), 0.2),
        Check::at_most("forced_residual_at_coarse_step", max_residual(&forced, 1e-2)?, 1e-12),
    ])
}

/// `L0 = -x` focuses at `(u, x) = (1, 0)`.
pub fn caustic_focus() -> Result<Vec<Check>> {
    let sol = BurgersSolution::flat(|x| -x, (-2.0, 2.0), 401)?;
    let c = sol
        .caustic_detect(Region { u_min: 0.0, u_max: 2.0, steps: 64 })?
        .ok_or_else(|| Error::InvalidArgument("no caustic found".into()))?;
    let mut blocked = 0;
    let probes = [(1.0, 0.0), (1.0, 0.5), (1.25, 0.0), (1.5, -0.3), (2.0, 0.1)];
    for (u, x) in probes {
        if matches!(eval_flat(&sol, u, x), Err(Error::CausticReached { .. })) {
            blocked += 1;
        }
    }
    Ok(vec![
        Check::at_most("u_star_error", (c.u - 1.0).abs(), 1e-6),
        Check::at_most("x_star_error", c.x.abs(), 1e-6),
        Check::equals("evaluations_blocked", blocked as f64, probes.len() as f64),
    ])
}

/// Tangent lines, the dual-circle surface and a transverse conic.
pub fn circle_example() -> Result<Vec<Check>> {
    let pt = HPoint::new([2.0, 0.0, 1.0])?;
    let lines = circle_tangent_lines(&pt);
    let s3 = 3f64.sqrt();
    let mut tangent = 0.0_f64;
    for want in [[1.0, s3, -2.0], [1.0, -s3, -2.0]] {
        let want = HPoint::new(want)?;
        let best = lines.iter().map(|l| l.angle_sine(&want)).fold(f64::INFINITY, f64::min);
        tangent = tangent.max(best);
    }
    let surf = surface_from_caustic(&dual_circle, (0.0, TAU), 200, 4)?;
    let caustic = surf.caustic.expect("built from a curve");
    let mut worst = [0.0_f64; 3];
    for e in &caustic.samples {
        let [x, y, z] = *e.point.coords();
        let [p, q, r] = *e.line.coords();
        for (w, v) in worst.iter_mut().zip([x * x + y * y - z * z, x * p + y * q + z * r, p * p + q * q - r * r]) {
            *w = w.max(v.abs());
        }
    }
    let conic = ProjectiveCauchyCurve {
        point: Arc::new(|t: f64| [2f64.sqrt() * t.cos(), 2f64.sqrt() * t.sin(), 1.0]),
        datum: Arc::new(|t: f64| [(t + FRAC_PI_4).cos(), (t + FRAC_PI_4).sin(), -1.0]),
        range: (0.0, TAU),
        samples: 200,
    };
    Ok(vec![
        Check::equals("tangent_line_count", lines.len() as f64, 2.0),
        Check::at_most("tangent_line_angle", tangent, 1e-12),
        Check::equals("caustic_samples", caustic.samples.len() as f64, 200.0),
        Check::at_most("circle_residual", worst[0], 1e-10),
        Check::at_most("incidence_residual", worst[1], 1e-10),
        Check::at_most("dual_circle_residual", worst[2], 1e-10),
        Check::above("conic_transversality_margin", projective_transversality(&conic)?, 0.0),
    ])
}

fn trace_error(f: &Forcing, step: f64, exact: impl Fn(f64) -> f64) -> Result<f64> {
    let end = characteristic_trace(f, 0.0, 0.3, 0.7, 1.0, step)?.pop().expect("trace is nonempty");
    Ok((end.x - exact(end.u)).abs())
}

/// RK4 step halving on `x'' = g` and `x'' = x'`.
pub fn integrator_order() -> Result<Vec<Check>> {
    let g = 0.5;
    let gravity = |step| trace_error(&Forcing::constant(g), step, |u| 0.3 + 0.7 * u + 0.5 * g * u * u);
    let drag = |step| trace_error(&Forcing::cubic([0.0, 1.0, 0.0, 0.0]), step, |u| 0.3 + 0.7 * u.exp_m1());
    let h = 0.1;
    let (g1, g2) = (gravity(h)?, gravity(h / 2.0)?);
    let (d1, d2) = (drag(h)?, drag(h / 2.0)?);
    Ok(vec![
        Check::at_most("gravity_ratio_deviation", (g1 / g2 / 16.0 - 1.0).abs(), 0.3),
        Check::at_most("gravity_error", g1.max(g2), 1e-12),
        Check::at_most("drag_ratio_deviation", (d1 / d2 / 16.0 - 1.0).abs(), 0.3),
    ])
}

/// Straight incidence curves have straight duals.
pub fn dual_straight() -> Result<Vec<Check>> {
    let grid = DualGrid::uniform((0.5, 1.5, 5), (-1.0, 1.0, 5), (-1.0, 1.0, 5));
    let free = dual_ode_extract(&Forcing::zero(), 0.0, &grid, 1e-3)?;
    let gravity = dual_ode_extract(&Forcing::constant(0.5), 0.0, &grid, 1e-3)?;
    Ok(vec![
        Check::at_most("free_max_b_second", free.max_abs_second(), 1e-6),
        Check::at_most("gravity_max_b_second", gravity.max_abs_second(), 1e-6),
    ])
}

/// Scattering data of the flat congruence checks.
pub fn flat_data() -> ScatteringData {
    ScatteringData::on_cut(|x, _| 0.3 * x.tanh(), |_, y| 0.2 * y.tanh(), (-1.0, 4.0), (-1.0, 4.0), 201)
}

/// A box of scri on which `κ` stays in one chart and the lines foliate.
pub fn flat_domain(n: usize) -> ScriBox {
    ScriBox { u: (0.0, 0.5), x: (1.2, 2.2), y: (1.2, 2.2), n: [n, n, n] }
}

pub const T_SAMPLES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Rotation rate of the sheared control congruence.
pub const TWIST_RATE: f64 = 0.1;

/// Shearfree congruence from flat data, with a twisted control.
pub fn flat_congruence(n: usize) -> Result<(Vec<Check>, KappaField)> {
    let domain = flat_domain(n);
    let kappa = solve_scattering(&flat_data(), &Forcing::zero(), &Forcing::zero(), domain)?;
    let round_trip = round_trip_error(&kappa)?;
    let c = Congruence::new(Arc::new(KappaFamily { kappa: kappa.clone() }), domain, T_SAMPLES.to_vec());
    c.check_foliation(1e-3)?;
    let report = shear_report(&c, &domain, &T_SAMPLES, 1e-3)?;
    let twisted = Congruence::new(Arc::new(TwistedFamily { inner: c.family.clone(), rate: TWIST_RATE }), domain, T_SAMPLES.to_vec());
    let control = shear_report(&twisted, &domain, &T_SAMPLES, 1e-3)?;
    let checks = vec![
        Check::equals("null_defect", max_null_defect(&c)?, 0.0),
        Check::at_most("max_shear", report.max_shear, 1e-6),
        Check::at_most("max_frobenius", report.max_frobenius[0].max(report.max_frobenius[1]), 1e-6),
        Check::at_most("round_trip_error", round_trip, 1e-9),
        Check::at_least("control_max_shear", control.max_shear, 0.05),
    ];
    Ok((checks, kappa))
}

/// Cubic forcings on both families, and rejection of quartic ones.
pub fn forced_pair() -> Result<Vec<Check>> {
    let domain = ScriBox { u: (0.0, 0.5), x: (1.2, 2.2), y: (1.2, 2.2), n: [6, 6, 6] };
    let sigma = Forcing::cubic([0.1, 0.0, 0.0, 0.05]);
    let sigma_tilde = Forcing::cubic([0.0, 0.0, 0.05, 0.0]);
    let kappa = solve_scattering(&flat_data(), &sigma, &sigma_tilde, domain)?;
    let res = kappa.residuals(1e-3)?;
    let quartic = [Coefficient::Zero, Coefficient::Zero, Coefficient::Zero, Coefficient::Zero, Coefficient::Const(0.01)];
    let rejected = matches!(Forcing::from_polynomial(quartic.to_vec()), Err(Error::QuarticForcing { degree: 4 }));
    Ok(vec![
        Check::at_most("max_residual_L", res.l, 1e-6),
        Check::at_most("max_residual_M", res.m, 1e-6),
        Check::equals("quartic_rejected", rejected as u8 as f64, 1.0),
    ])
}

/// Slopes to flag to scri point, and the rank of `κ`'s differentials.
pub fn flag_round_trips(kappa: Option<&KappaField>) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst = 0.0_f64;
    let away = |rng: &mut ChaCha8Rng| rng.gen_range(0.1..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    for _ in 0..1_000 {
        let (u, x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (l, m) = (away(&mut rng), away(&mut rng));
        let p = scri_intersection(&flag_from_slopes(&scri_point(u, x, y), l, m)?)?;
        worst = worst.max((p.u - u).abs().max((p.x - x).abs()).max((p.y - y).abs()));
    }
    let mut checks = vec![Check::at_most("scri_round_trip", worst, 1e-10)];
    if let Some(kappa) = kappa {
        let ranks = kappa_ranks(kappa, &kappa.domain.points(), 1e-3, 1e-6)?;
        for (name, r) in [("rank_v1_min", ranks.min_v1), ("rank_v1_max", ranks.max_v1), ("rank_v3_min", ranks.min_v3), ("rank_v3_max", ranks.max_v3)] {
            checks.push(Check::equals(name, r as f64, 2.0));
        }
    }
    Ok(checks)
}

/// Runs all ten criteria.
pub fn run_all() -> Vec<Criterion> {
    let mut out = vec![
        Criterion::from_checks(1, "Plucker relation and null separation", plucker_suite()),
        Criterion::from_checks(2, "flat Burgers closed form", flat_closed_form()),
        Criterion::from_checks(3, "residual convergence under step halving", residual_convergence()),
        Criterion::from_checks(4, "caustic of L0 = -x", caustic_focus()),
        Criterion::from_checks(5, "circle example", circle_example()),
        Criterion::from_checks(6, "integrator order", integrator_order()),
        Criterion::from_checks(7, "dual of straight incidence", dual_straight()),
    ];
    let flat = flat_congruence(21);
    let kappa = flat.as_ref().ok().map(|(_, k)| k.clone());
    out.push(Criterion::from_checks(8, "shearfree congruence from flat data", flat.map(|(checks, _)| checks)));
    out.push(Criterion::from_checks(9, "forced pair", forced_pair()));
    out.push(Criterion::from_checks(10, "flag round trips and kappa ranks", flag_round_trips(kappa.as_ref())));
    out
}
