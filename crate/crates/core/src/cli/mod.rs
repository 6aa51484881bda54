//! Command-line front end: scenario files in, `summary.json` and CSV tables out.

pub mod expr;
pub mod run;
pub mod scenario;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

pub use run::{classify, run_scenario, Check, Outcome, EXIT_CHECKS, EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "SHEARFREE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Congruence,
    Caustic,
    Dual,
    ExampleCircle,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Congruence => "congruence",
            Command::Caustic => "caustic",
            Command::Dual => "dual",
            Command::ExampleCircle => "example-circle",
            Command::Selftest => "selftest",
        }
    }

    /// Scenario kinds this command accepts.
    pub fn kinds(self) -> &'static [&'static str] {
        match self {
            Command::Solve => &["burgers-flat", "burgers-forced"],
            Command::Congruence => &["congruence"],
            Command::Caustic => &["caustic"],
            Command::Dual => &["dual-ode"],
            Command::ExampleCircle => &["circle-example"],
            Command::Selftest => &[],
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Scenario file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (falls back to SHEARFREE_THREADS, then all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Solve a flat or forced Burgers problem on a grid.
    Solve(CommonArgs),
    /// Build the congruence from scattering data and measure its shear.
    Congruence(CommonArgs),
    /// Locate the first caustic of a Cauchy problem.
    Caustic(CommonArgs),
    /// Extract the dual second-order ODE of a forcing.
    Dual(CommonArgs),
    /// The circle/dual-circle Burgers surface.
    ExampleCircle(CommonArgs),
    /// Run the built-in acceptance criteria.
    Selftest(CommonArgs),
}

#[derive(Debug, Parser)]
#[command(name = "shearfree", version, about = "Shearfree null congruences from forced Burgers' equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

impl Sub {
    fn split(&self) -> (Command, &CommonArgs) {
        match self {
            Sub::Solve(a) => (Command::Solve, a),
            Sub::Congruence(a) => (Command::Congruence, a),
            Sub::Caustic(a) => (Command::Caustic, a),
            Sub::Dual(a) => (Command::Dual, a),
            Sub::ExampleCircle(a) => (Command::ExampleCircle, a),
            Sub::Selftest(a) => (Command::Selftest, a),
        }
    }
}

/// Thread count from the flag, else the environment; `Err` names the bad value.
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>, String> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(v)) => v.trim().parse().map_err(|_| format!("{THREADS_ENV}={v:?} is not a thread count"))?,
        (None, None) => return Ok(None),
    };
    if n == 0 {
        return Err("thread count must be at least 1".into());
    }
    Ok(Some(n))
}

fn configure_threads(n: Option<usize>) {
    if let Some(n) = n {
        // A second configuration in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn selftest(out: &Path, scenario: Option<&Path>) -> Outcome {
    let results = crate::acceptance::run_all();
    let passed = results.iter().all(|r| r.passed);
    let mut summary = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": "selftest",
        "criteria": results,
        "passed": passed,
        "error": null,
    });
    let mut code = if passed { EXIT_OK } else { EXIT_CHECKS };
    let mut lines: Vec<String> = results.iter().map(|r| r.line()).collect();
    if let Some(path) = scenario {
        let inner = run_scenario_any(path, &out.join("scenario"));
        summary["scenario"] = inner.summary.clone();
        lines.push(format!("scenario {}: {}", path.display(), inner.message));
        if inner.exit_code != EXIT_OK {
            code = EXIT_CHECKS;
        }
    }
    summary["exit_code"] = json!(code);
    let outcome = Outcome { exit_code: code, summary, message: lines.join("\n") };
    run::write_summary(out, &outcome);
    outcome
}

/// Runs a scenario with whichever command accepts its kind.
fn run_scenario_any(path: &Path, out: &Path) -> Outcome {
    let kind = std::fs::read_to_string(path)
        .ok()
        .and_then(|t| scenario::Scenario::parse(&t).ok())
        .and_then(|s| s.entry("scenario", "kind").map(|e| e.value.clone()));
    let cmd = [Command::Solve, Command::Congruence, Command::Caustic, Command::Dual, Command::ExampleCircle]
        .into_iter()
        .find(|c| kind.as_deref().is_some_and(|k| c.kinds().contains(&k)))
        .unwrap_or(Command::Solve);
    run_scenario(cmd, path, out)
}

/// Executes parsed arguments; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let (cmd, args) = cli.command.split();
    let env = std::env::var(THREADS_ENV).ok();
    match thread_count(args.threads, env.as_deref()) {
        Ok(n) => configure_threads(n),
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_PARSE;
        }
    }
    let outcome = match (cmd, &args.scenario) {
        (Command::Selftest, s) => selftest(&args.out, s.as_deref()),
        (_, Some(path)) => run_scenario(cmd, path, &args.out),
        (_, None) => {
            eprintln!("error: `{}` requires --scenario <path>", cmd.name());
            return EXIT_PARSE;
        }
    };
    if outcome.exit_code == EXIT_OK {
        println!("{}", outcome.message);
    } else {
        eprintln!("{}", outcome.message);
    }
    outcome.exit_code
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
