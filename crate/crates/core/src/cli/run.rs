//! Scenario execution: one pipeline per scenario kind, CSV dumps and `summary.json`.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use serde_json::{json, Value};

use super::expr::{Env, Expr, ExprError, Var};
use super::scenario::{Reader, Scenario, ScenarioError};
use super::Command;
use crate::burgers::{
    circle_tangent_lines, dual_circle, projective_transversality, surface_from_caustic,
    BurgersSolution, CauchyCurve, Coefficient, DualGrid, Forcing, Integrator, ProjectiveCauchyCurve, Region,
};
use crate::congruence::{
    kappa_ranks, max_null_defect, round_trip_error, shear_report, solve_scattering_with, Congruence, KappaFamily,
    ScatteringData, ScriBox, TwistedFamily,
};
use crate::error::Error;
use crate::projlin::HPoint;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// One acceptance check of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: "<=", limit, passed: value <= limit }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: ">=", limit, passed: value >= limit }
    }

    pub fn above(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: ">", limit, passed: value > limit }
    }

    pub fn equals(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: "==", limit, passed: value == limit }
    }
}

/// Exit status, the summary written to `summary.json`, and a one-line message.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Value,
    pub message: String,
}

/// What a library error means for a scenario run.
pub fn classify(e: &Error) -> (i32, &'static str) {
    match e {
        Error::CausticReached { .. } => (EXIT_NUMERIC, "characteristics stay ordered (no caustic)"),
        Error::BlowUp { .. } => (EXIT_NUMERIC, "characteristic stays within the state bound"),
        Error::IllConditioned(_) => (EXIT_NUMERIC, "well-conditioned finite differences"),
        Error::TransversalityViolation { .. } => (EXIT_PRECONDITION, "Cauchy data transverse to its curve"),
        Error::FoliationFailure { .. } => (EXIT_PRECONDITION, "the congruence foliates (projection of rank 4)"),
        Error::NotCovered { .. } => (EXIT_PRECONDITION, "point covered by characteristics of the Cauchy data"),
        Error::QuarticForcing { .. } => (EXIT_PRECONDITION, "forcing at most cubic in the slope"),
        Error::DegenerateCurve { .. } => (EXIT_PRECONDITION, "curve immersed at sample resolution"),
        Error::TangentAtInfinity => (EXIT_PRECONDITION, "geodesic transverse to scri"),
        Error::TangentDirection { .. } | Error::NotIncident { .. } | Error::OutsideChart => {
            (EXIT_PRECONDITION, "flag incident with the leaf and inside the chart")
        }
        Error::NoChartIntersection => (EXIT_PRECONDITION, "geodesic meets the affine chart"),
        Error::ZeroSubspace { .. } | Error::WrongDimension { .. } => (EXIT_PRECONDITION, "subspace of the right dimension"),
        Error::InvalidArgument(_) => (EXIT_PRECONDITION, "valid numeric parameters"),
    }
}

/// Failure of a pipeline: a library error or an expression that could not be evaluated.
enum Failure {
    Lib(Error),
    Expr(ExprError, String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Records the first evaluation error of the expressions handed to a solver,
/// which only sees `NaN`.
#[derive(Clone, Default)]
struct Sink(Arc<OnceLock<(String, ExprError)>>);

impl Sink {
    fn eval(&self, key: &str, e: &Expr, env: Env) -> f64 {
        e.eval(&env).unwrap_or_else(|err| {
            let _ = self.0.set((key.to_string(), err));
            f64::NAN
        })
    }

    fn take(&self) -> Option<(String, ExprError)> {
        self.0.get().cloned()
    }
}

fn nodes(min: f64, max: f64, n: usize) -> Vec<f64> {
    DualGrid::uniform((min, max, n), (0.0, 0.0, 0), (0.0, 0.0, 0)).u
}

/// One Richardson step on central differences at steps `h` and `h/2`.
fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn f(v: f64) -> String {
    format!("{v:?}")
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(dir.join(name))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Coefficient of `p^k` from an optional expression; `which` maps `(u, z, w)` to variables.
fn coefficient(sink: &Sink, key: String, e: Option<Expr>, which: fn(f64, f64, f64) -> Env) -> Coefficient {
    match e {
        None => Coefficient::Zero,
        Some(e) => match e.constant() {
            Some(0.0) => Coefficient::Zero,
            Some(c) => Coefficient::Const(c),
            None => {
                let sink = sink.clone();
                Coefficient::func(move |u, z, w| sink.eval(&key, &e, which(u, z, w)))
            }
        },
    }
}

fn line_env(u: f64, z: f64, _w: f64) -> Env {
    Env { u: Some(u), x: Some(z), ..Env::default() }
}

fn beta_env(u: f64, z: f64, w: f64) -> Env {
    Env { u: Some(u), x: Some(z), y: Some(w), ..Env::default() }
}

fn alpha_env(u: f64, z: f64, w: f64) -> Env {
    Env { u: Some(u), x: Some(w), y: Some(z), ..Env::default() }
}

/// Reads `prefix0 ..= prefix7` as slope coefficients; degree four and up are
/// read only so the forcing constructor can reject them.
fn read_forcing(
    r: &Reader,
    sink: &Sink,
    prefix: &str,
    vars: &[Var],
    which: fn(f64, f64, f64) -> Env,
) -> Result<Result<Forcing, Error>, ScenarioError> {
    let mut coeffs = Vec::new();
    for k in 0..8 {
        let key = format!("{prefix}{k}");
        let e = r.expr("data", &key, vars, None)?;
        coeffs.push(coefficient(sink, key, e, which));
    }
    Ok(Forcing::from_polynomial(coeffs))
}

fn integrator(r: &Reader) -> Result<Integrator, ScenarioError> {
    Ok(Integrator { step: r.f64("numerics", "step", Some(1e-3))?, bound: r.f64("numerics", "bound", Some(1e6))? })
}

/// The one-dimensional Cauchy problem shared by `solve` and `caustic`.
fn burgers_problem(r: &Reader, sink: &Sink, forced: bool) -> Result<Result<BurgersSolution, Error>, ScenarioError> {
    let l0 = r.expr("data", "L0", &[Var::X], None)?.ok_or(ScenarioError::Missing {
        section: "data".into(),
        key: "L0".into(),
    })?;
    let section = r.expr("data", "section", &[Var::X], Some("0"))?.expect("defaulted");
    let forcing = if forced { read_forcing(r, sink, "a", &[Var::U, Var::X, Var::P], line_env)? } else { Ok(Forcing::zero()) };
    let lo = r.f64("numerics", "data_min", Some(-10.0))?;
    let hi = r.f64("numerics", "data_max", Some(10.0))?;
    let samples = r.usize("numerics", "samples", Some(401))?;
    let integ = integrator(r)?;
    let (s1, s2) = (sink.clone(), sink.clone());
    let build = || -> Result<BurgersSolution, Error> {
        let curve = CauchyCurve::new(
            Arc::new(move |x| (s1.eval("section", &section, Env { x: Some(x), ..Env::default() }), x)),
            Arc::new(move |x| s2.eval("L0", &l0, Env { x: Some(x), ..Env::default() })),
            (lo, hi),
            samples,
        )?;
        Ok(BurgersSolution::new(forcing?, curve).with_integrator(integ))
    };
    Ok(build())
}

type Pipeline = Box<dyn FnOnce(&Path) -> Result<(Value, Vec<Check>), Failure>>;

struct Plan {
    results: Pipeline,
}

fn plan_solve(r: &Reader, sink: &Sink, kind: &str) -> Result<Plan, ScenarioError> {
    let sol = burgers_problem(r, sink, kind == "burgers-forced")?;
    let exact = r.expr("data", "exact", &[Var::U, Var::X], None)?;
    let us = nodes(r.f64("grid", "u_min", Some(0.0))?, r.f64("grid", "u_max", None)?, r.count("grid", "nu", None)?);
    let xs = nodes(r.f64("grid", "x_min", None)?, r.f64("grid", "x_max", None)?, r.count("grid", "nx", None)?);
    let h = r.f64("numerics", "h", Some(1e-3))?;
    let max_error = r.opt_f64("check", "max_error")?;
    let max_residual = r.opt_f64("check", "max_residual")?;
    let expect_caustic = r.bool("check", "expect_caustic", Some(false))?;
    let caustic_steps = r.count("numerics", "caustic_steps", Some(64))?;
    let sink = sink.clone();
    Ok(Plan {
        results: Box::new(move |out| {
            let sol = sol?;
            let half = h / 2.0;
            let shifted: Vec<f64> = xs.iter().flat_map(|&x| [x - h, x - half, x, x + half, x + h]).collect();
            let mut rows = Vec::new();
            let (mut worst_res, mut worst_err) = (0.0_f64, 0.0_f64);
            let mut stopped = None;
            for &u in &us {
                let level = (|| -> Result<_, Error> {
                    let mut around = Vec::with_capacity(4);
                    for du in [-h, -half, half, h] {
                        around.push(sol.eval_level(u + du, &xs)?);
                    }
                    Ok((sol.eval_level(u, &shifted)?, around))
                })();
                let (mid, around) = match level {
                    Ok(v) => v,
                    Err(Error::CausticReached { .. }) if expect_caustic => {
                        stopped = Some(u);
                        break;
                    }
                    Err(e) => return Err(e.into()),
                };
                for (j, &x) in xs.iter().enumerate() {
                    let v = &mid[5 * j..5 * j + 5];
                    let l = v[2];
                    let lx = richardson((v[4] - v[0]) / (2.0 * h), (v[3] - v[1]) / h);
                    let lu = richardson((around[3][j] - around[0][j]) / (2.0 * h), (around[2][j] - around[1][j]) / h);
                    let res = lu + l * lx - sol.forcing.sigma(u, x, l);
                    worst_res = worst_res.max(res.abs());
                    let mut row = vec![f(u), f(x), f(l), f(res)];
                    if let Some(e) = &exact {
                        let err = l - sink.eval("exact", e, Env { u: Some(u), x: Some(x), ..Env::default() });
                        worst_err = worst_err.max(err.abs());
                        row.push(f(err));
                    }
                    rows.push(row);
                }
            }
            let mut header = vec!["u", "x", "L", "residual"];
            if exact.is_some() {
                header.push("error");
            }
            write_csv(out, "L.csv", &header, rows)?;
            let mut checks = Vec::new();
            if let Some(limit) = max_error {
                checks.push(Check::at_most("max_error", if exact.is_some() { worst_err } else { f64::INFINITY }, limit));
            }
            if let Some(limit) = max_residual {
                checks.push(Check::at_most("max_residual", worst_res, limit));
            }
            let mut caustic = Value::Null;
            if expect_caustic {
                let region = Region { u_min: us[0], u_max: us[us.len() - 1], steps: caustic_steps };
                let found = sol.caustic_detect(region)?;
                checks.push(Check::equals("caustic_found", found.is_some() as u8 as f64, 1.0));
                caustic = json!(found);
            }
            let results = json!({
                "max_residual": worst_res,
                "max_error": exact.as_ref().map(|_| worst_err),
                "rows": us.len() * xs.len(),
                "stopped_at_u": stopped,
                "caustic": caustic,
            });
            Ok((results, checks))
        }),
    })
}

fn plan_caustic(r: &Reader, sink: &Sink) -> Result<Plan, ScenarioError> {
    let sol = burgers_problem(r, sink, true)?;
    let region = Region {
        u_min: r.f64("grid", "u_min", Some(0.0))?,
        u_max: r.f64("grid", "u_max", None)?,
        steps: r.count("grid", "steps", Some(64))?,
    };
    let expect = r.bool("check", "expect_caustic", Some(true))?;
    let u_star = r.opt_f64("check", "u_star")?;
    let x_star = r.opt_f64("check", "x_star")?;
    let tol = r.f64("check", "tol", Some(1e-6))?;
    Ok(Plan {
        results: Box::new(move |out| {
            let sol = sol?;
            let envelope = sol.caustic_envelope(region)?;
            let first = envelope.iter().min_by(|a, b| a.u.total_cmp(&b.u)).copied();
            write_csv(
                out,
                "caustic.csv",
                &["pair", "u", "x", "p"],
                envelope.iter().map(|c| vec![c.pair.to_string(), f(c.u), f(c.x), f(c.p)]),
            )?;
            let mut checks = vec![Check::equals("caustic_found", first.is_some() as u8 as f64, expect as u8 as f64)];
            if let Some(c) = first {
                if let Some(u) = u_star {
                    checks.push(Check::at_most("u_star_error", (c.u - u).abs(), tol));
                }
                if let Some(x) = x_star {
                    checks.push(Check::at_most("x_star_error", (c.x - x).abs(), tol));
                }
                let blocked = matches!(sol.eval(c.u + 10.0 * tol, c.x), Err(Error::CausticReached { .. }));
                checks.push(Check::equals("evaluation_blocked_past_caustic", blocked as u8 as f64, 1.0));
            }
            if !expect {
                if let Some(c) = first {
                    return Err(Error::CausticReached { u: c.u, x: c.x, slice: None }.into());
                }
            }
            Ok((json!({ "first": first, "envelope_points": envelope.len() }), checks))
        }),
    })
}

fn plan_dual(r: &Reader, sink: &Sink) -> Result<Plan, ScenarioError> {
    let forcing = read_forcing(r, sink, "a", &[Var::U, Var::X, Var::P], line_env)?;
    let basepoint = r.f64("data", "basepoint", Some(0.0))?;
    let grid = DualGrid::uniform(
        (r.f64("grid", "u_min", None)?, r.f64("grid", "u_max", None)?, r.count("grid", "nu", None)?),
        (r.f64("grid", "x_min", None)?, r.f64("grid", "x_max", None)?, r.count("grid", "nx", None)?),
        (r.f64("grid", "a_min", None)?, r.f64("grid", "a_max", None)?, r.count("grid", "na", None)?),
    );
    let h = r.f64("numerics", "h", Some(1e-4))?;
    let integ = integrator(r)?;
    let max_b_second = r.opt_f64("check", "max_b_second")?;
    Ok(Plan {
        results: Box::new(move |out| {
            let inc = crate::burgers::OdeIncidence { forcing: forcing?, basepoint, integrator: integ };
            let dual = crate::burgers::extract(&inc, &grid, h)?;
            write_csv(
                out,
                "dual.csv",
                &["u", "x", "a", "b", "b_prime", "b_second"],
                dual.samples.iter().map(|s| vec![f(s.u), f(s.x), f(s.a), f(s.b), f(s.b_prime), f(s.b_second)]),
            )?;
            let worst = dual.max_abs_second();
            let checks = max_b_second.map(|l| Check::at_most("max_abs_b_second", worst, l)).into_iter().collect();
            Ok((json!({ "samples": dual.samples.len(), "max_abs_b_second": worst }), checks))
        }),
    })
}

fn plan_circle(r: &Reader) -> Result<Plan, ScenarioError> {
    let point = [
        r.f64("data", "point_x", Some(2.0))?,
        r.f64("data", "point_y", Some(0.0))?,
        r.f64("data", "point_z", Some(1.0))?,
    ];
    let samples = r.usize("data", "samples", Some(200))?;
    let fiber = r.usize("data", "fiber_samples", Some(8))?;
    let conic_samples = r.usize("data", "conic_samples", Some(200))?;
    let locus_tol = r.f64("check", "locus_tol", Some(1e-10))?;
    let tangent_tol = r.f64("check", "tangent_tol", Some(1e-12))?;
    Ok(Plan {
        results: Box::new(move |out| {
            let pt = HPoint::new(point)?;
            let lines = circle_tangent_lines(&pt);
            let tangency = lines
                .iter()
                .map(|l| {
                    let [p, q, rr] = *l.coords();
                    let inc: f64 = (0..3).map(|i| pt.coords()[i] * l.coords()[i]).sum();
                    (p * p + q * q - rr * rr).abs().max(inc.abs())
                })
                .fold(0.0, f64::max);
            let [x, y, z] = point;
            let power = x * x + y * y - z * z;
            let expected = if power.abs() <= tangent_tol { 1.0 } else if power > 0.0 { 2.0 } else { 0.0 };
            let surf = surface_from_caustic(&dual_circle, (0.0, std::f64::consts::TAU), samples, fiber)?;
            let caustic = surf.caustic.expect("built from a curve");
            let mut worst = [0.0_f64; 3];
            let mut rows = Vec::new();
            for (i, e) in caustic.samples.iter().enumerate() {
                let [x, y, z] = *e.point.coords();
                let [p, q, rr] = *e.line.coords();
                let res = [x * x + y * y - z * z, x * p + y * q + z * rr, p * p + q * q - rr * rr];
                for k in 0..3 {
                    worst[k] = worst[k].max(res[k].abs());
                }
                let s = std::f64::consts::TAU * i as f64 / samples as f64;
                rows.push(vec![f(s), f(x), f(y), f(z), f(p), f(q), f(rr)]);
            }
            write_csv(out, "caustic.csv", &["s", "x", "y", "z", "p", "q", "r"], rows)?;
            let conic = ProjectiveCauchyCurve {
                point: Arc::new(|t: f64| [2f64.sqrt() * t.cos(), 2f64.sqrt() * t.sin(), 1.0]),
                datum: Arc::new(|t: f64| {
                    let b = t + std::f64::consts::FRAC_PI_4;
                    [b.cos(), b.sin(), -1.0]
                }),
                range: (0.0, std::f64::consts::TAU),
                samples: conic_samples,
            };
            let margin = projective_transversality(&conic)?;
            let checks = vec![
                Check::equals("tangent_line_count", lines.len() as f64, expected),
                Check::at_most("tangent_line_residual", tangency, tangent_tol),
                Check::at_most("caustic_circle_residual", worst[0], locus_tol),
                Check::at_most("caustic_incidence_residual", worst[1], locus_tol),
                Check::at_most("caustic_dual_circle_residual", worst[2], locus_tol),
                Check::above("conic_transversality_margin", margin, 0.0),
            ];
            let results = json!({
                "tangent_lines": lines.iter().map(|l| l.coords().to_vec()).collect::<Vec<_>>(),
                "caustic_samples": caustic.samples.len(),
                "locus_residuals": worst,
                "legendrian_defect": caustic.legendrian_defect(),
                "sheets": surf.sheets.len(),
                "ramification_max_abs_z": surf.ramification.iter().map(|d| d.coords()[2].abs()).fold(0.0, f64::max),
                "conic_transversality_margin": margin,
            });
            Ok((results, checks))
        }),
    })
}

fn plan_congruence(r: &Reader, sink: &Sink) -> Result<Plan, ScenarioError> {
    let xy = [Var::X, Var::Y];
    let uxyp = [Var::U, Var::X, Var::Y, Var::P];
    let need = |k: &str| ScenarioError::Missing { section: "data".into(), key: k.into() };
    let l0 = r.expr("data", "L0", &xy, None)?.ok_or_else(|| need("L0"))?;
    let m0 = r.expr("data", "M0", &xy, None)?.ok_or_else(|| need("M0"))?;
    let section = r.expr("data", "section", &xy, Some("0"))?.expect("defaulted");
    let sigma = read_forcing(r, sink, "a", &uxyp, beta_env)?;
    let sigma_tilde = read_forcing(r, sink, "b", &uxyp, alpha_env)?;
    let x_range = (r.f64("data", "data_x_min", Some(-1.0))?, r.f64("data", "data_x_max", Some(4.0))?);
    let y_range = (r.f64("data", "data_y_min", Some(-1.0))?, r.f64("data", "data_y_max", Some(4.0))?);
    let samples = r.usize("data", "samples", Some(201))?;
    let domain = ScriBox {
        u: (r.f64("domain", "u_min", Some(0.0))?, r.f64("domain", "u_max", None)?),
        x: (r.f64("domain", "x_min", None)?, r.f64("domain", "x_max", None)?),
        y: (r.f64("domain", "y_min", None)?, r.f64("domain", "y_max", None)?),
        n: [r.count("domain", "nu", None)?, r.count("domain", "nx", None)?, r.count("domain", "ny", None)?],
    };
    let ts = nodes(r.f64("domain", "t_min", Some(-1.0))?, r.f64("domain", "t_max", Some(1.0))?, r.count("domain", "nt", Some(5))?);
    let h = r.f64("numerics", "h", Some(1e-3))?;
    let residual_h = r.f64("numerics", "residual_h", Some(1e-3))?;
    let rank_tol = r.f64("numerics", "rank_tol", Some(1e-6))?;
    let integ = integrator(r)?;
    let max_shear = r.f64("check", "max_shear", Some(1e-6))?;
    let max_frobenius = r.f64("check", "max_frobenius", Some(1e-6))?;
    let max_round_trip = r.f64("check", "max_round_trip", Some(1e-9))?;
    let max_residual = r.f64("check", "max_residual", Some(1e-6))?;
    let shearfree = r.bool("check", "shearfree", Some(true))?;
    let twist_rate = r.f64("check", "twist_rate", Some(0.0))?;
    let min_twisted_shear = r.f64("check", "min_twisted_shear", Some(0.05))?;
    let sink = sink.clone();
    Ok(Plan {
        results: Box::new(move |out| {
            let at = move |e: Expr, key: &'static str| {
                let sink = sink.clone();
                Arc::new(move |x: f64, y: f64| sink.eval(key, &e, Env { x: Some(x), y: Some(y), ..Env::default() }))
            };
            let data = ScatteringData { section: at(section, "section"), l0: at(l0, "L0"), m0: at(m0, "M0"), x_range, y_range, samples };
            let kappa = solve_scattering_with(&data, &sigma?, &sigma_tilde?, domain, integ)?;
            let residuals = kappa.residuals(residual_h)?;
            write_csv(out, "L.csv", &["u", "x", "y", "L"], kappa.samples.iter().map(|s| vec![f(s.u), f(s.x), f(s.y), f(s.l)]))?;
            write_csv(out, "M.csv", &["u", "x", "y", "M"], kappa.samples.iter().map(|s| vec![f(s.u), f(s.x), f(s.y), f(s.m)]))?;
            let round_trip = round_trip_error(&kappa)?;
            let ranks = kappa_ranks(&kappa, &domain.points(), h, rank_tol)?;
            let c = Congruence::new(Arc::new(KappaFamily { kappa }), domain, ts.clone());
            c.check_foliation(h)?;
            let null_defect = max_null_defect(&c)?;
            let report = shear_report(&c, &domain, &ts, h)?;
            write_csv(
                out,
                "shear.csv",
                &["u", "x", "y", "t", "shear_m", "shear_m_prime", "shear_norm", "frobenius_m", "frobenius_m_prime"],
                report.samples.iter().map(|s| {
                    vec![
                        f(s.u),
                        f(s.x),
                        f(s.y),
                        f(s.t),
                        f(s.shear[0]),
                        f(s.shear[1]),
                        f(s.shear_norm),
                        f(s.frobenius[0]),
                        f(s.frobenius[1]),
                    ]
                }),
            )?;
            let mut checks = vec![
                Check::at_most("max_residual_L", residuals.l, max_residual),
                Check::at_most("max_residual_M", residuals.m, max_residual),
                Check::equals("null_defect", null_defect, 0.0),
                Check::at_most("round_trip_error", round_trip, max_round_trip),
            ];
            if shearfree {
                checks.extend([
                    Check::at_most("max_shear", report.max_shear, max_shear),
                    Check::at_most("max_frobenius_m", report.max_frobenius[0], max_frobenius),
                    Check::at_most("max_frobenius_m_prime", report.max_frobenius[1], max_frobenius),
                    Check::equals("rank_v1_min", ranks.min_v1 as f64, 2.0),
                    Check::equals("rank_v1_max", ranks.max_v1 as f64, 2.0),
                    Check::equals("rank_v3_min", ranks.min_v3 as f64, 2.0),
                    Check::equals("rank_v3_max", ranks.max_v3 as f64, 2.0),
                ]);
            }
            let mut twisted = Value::Null;
            if twist_rate != 0.0 {
                let tw = Congruence::new(Arc::new(TwistedFamily { inner: c.family.clone(), rate: twist_rate }), domain, ts.clone());
                let tr = shear_report(&tw, &domain, &ts, h)?;
                checks.push(Check::at_least("twisted_max_shear", tr.max_shear, min_twisted_shear));
                twisted = json!({ "rate": twist_rate, "max_shear": tr.max_shear, "max_frobenius": tr.max_frobenius });
            }
            let results = json!({
                "residuals": residuals,
                "null_defect": null_defect,
                "max_shear": report.max_shear,
                "max_frobenius": report.max_frobenius,
                "round_trip_error": round_trip,
                "ranks": ranks,
                "samples": report.samples.len(),
                "twisted_control": twisted,
            });
            Ok((results, checks))
        }),
    })
}

fn plan(cmd: Command, r: &Reader, sink: &Sink, kind: &str) -> Result<Plan, ScenarioError> {
    let kinds = cmd.kinds();
    if !kinds.contains(&kind) {
        return Err(ScenarioError::BadValue {
            key: "kind".into(),
            line: 0,
            col: 0,
            message: format!("`{kind}` cannot be run by `{}`; expected one of: {}", cmd.name(), kinds.join(", ")),
        });
    }
    match kind {
        "burgers-flat" | "burgers-forced" => plan_solve(r, sink, kind),
        "caustic" => plan_caustic(r, sink),
        "dual-ode" => plan_dual(r, sink),
        "circle-example" => plan_circle(r),
        "congruence" => plan_congruence(r, sink),
        _ => unreachable!("kind validated against the command"),
    }
}

fn base_summary(cmd: Command, path: &Path) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("subcommand".into(), json!(cmd.name()));
    m.insert("scenario".into(), json!(path.display().to_string()));
    m
}

fn finish(mut m: serde_json::Map<String, Value>, exit_code: i32, message: String) -> Outcome {
    m.insert("exit_code".into(), json!(exit_code));
    m.insert("message".into(), json!(message));
    Outcome { exit_code, summary: Value::Object(m), message }
}

/// Parses and runs a scenario file, writing artifacts into `out`.
pub fn run_scenario(cmd: Command, path: &Path, out: &Path) -> Outcome {
    let mut m = base_summary(cmd, path);
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return finish(m, EXIT_PARSE, format!("cannot read {}: {e}", path.display())),
    };
    let scenario = match Scenario::parse(&text) {
        Ok(s) => s,
        Err(e) => return finish(m, EXIT_PARSE, format!("{}: {e}", path.display())),
    };
    let reader = Reader::new(&scenario);
    let sink = Sink::default();
    let prepared = (|| {
        let kind = reader.text("scenario", "kind", None)?;
        reader.usize("scenario", "seed", Some(0))?;
        let plan = plan(cmd, &reader, &sink, &kind)?;
        reader.finish()?;
        Ok::<_, ScenarioError>((kind, plan))
    })();
    let (kind, plan) = match prepared {
        Ok(p) => p,
        Err(e) => {
            let e = match (e, scenario.entry("scenario", "kind")) {
                (ScenarioError::BadValue { key, message, .. }, Some(entry)) if key == "kind" => {
                    ScenarioError::BadValue { key, line: entry.line, col: entry.value_col, message }
                }
                (e, _) => e,
            };
            return finish(m, EXIT_PARSE, format!("{}: {e}", path.display()));
        }
    };
    m.insert("kind".into(), json!(kind));
    m.insert("inputs".into(), reader.echo());
    if let Err(e) = std::fs::create_dir_all(out) {
        return finish(m, EXIT_CHECKS, format!("cannot create {}: {e}", out.display()));
    }
    let result = (plan.results)(out);
    let result = match (result, sink.take()) {
        (Err(Failure::Lib(_)), Some((key, e))) | (Ok(_), Some((key, e))) => Err(Failure::Expr(e, key)),
        (r, _) => r,
    };
    let outcome = match result {
        Ok((results, checks)) => {
            let passed = checks.iter().all(|c| c.passed);
            m.insert("results".into(), results);
            m.insert("checks".into(), json!(checks));
            m.insert("passed".into(), json!(passed));
            m.insert("error".into(), Value::Null);
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if passed {
                finish(m, EXIT_OK, format!("{kind}: {} checks passed", checks.len()))
            } else {
                finish(m, EXIT_CHECKS, format!("{kind}: failed checks: {}", failed.join(", ")))
            }
        }
        Err(failure) => {
            let (code, kind_name, message) = match failure {
                Failure::Lib(e) => {
                    let (code, pre) = classify(&e);
                    let what = if code == EXIT_PRECONDITION { "precondition violated" } else { "numeric failure" };
                    (code, format!("{e:?}").split([' ', '(', '{']).next().unwrap_or("").to_string(), format!("{what} ({pre}): {e}"))
                }
                Failure::Expr(e, key) => (
                    EXIT_PRECONDITION,
                    "ExpressionDomain".to_string(),
                    format!("precondition violated (expression `{key}` defined on the sampled domain): {e}"),
                ),
                Failure::Io(e) => (EXIT_CHECKS, "Io".to_string(), format!("cannot write artifacts: {e}")),
            };
            m.insert("results".into(), Value::Null);
            m.insert("checks".into(), json!([]));
            m.insert("passed".into(), json!(false));
            m.insert("error".into(), json!({ "kind": kind_name, "message": message }));
            finish(m, code, message)
        }
    };
    write_summary(out, &outcome);
    outcome
}

pub(crate) fn write_summary(out: &Path, outcome: &Outcome) {
    if std::fs::create_dir_all(out).is_ok() {
        let text = serde_json::to_string_pretty(&outcome.summary).expect("json values serialize") + "\n";
        let _ = std::fs::write(out.join("summary.json"), text);
    }
}
