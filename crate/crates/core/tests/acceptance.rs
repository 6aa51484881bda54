use std::process::ExitCode;

use shearfree::acceptance::run_all;

/// Step-halving ratios of schemes that are exact on their test problem.
const ROUNDOFF_RATIOS: [(u8, &str); 2] = [(3, "forced_ratio_deviation"), (6, "gravity_ratio_deviation")];

fn main() -> ExitCode {
    let results = run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let mut problems = Vec::new();
    if results.len() != 10 {
        problems.push(format!("expected 10 criteria, got {}", results.len()));
    }
    for r in &results {
        if let Some(e) = &r.error {
            problems.push(format!("criterion {} errored: {e}", r.id));
        }
        for c in r.checks.iter().filter(|c| !c.passed) {
            if !ROUNDOFF_RATIOS.contains(&(r.id, c.name.as_str())) {
                problems.push(format!("criterion {}: {} = {:e}, want {} {:e}", r.id, c.name, c.value, c.relation, c.limit));
            }
        }
    }
    for (id, name) in [(3, "forced_residual_at_coarse_step"), (6, "gravity_error")] {
        let ok = results.iter().find(|r| r.id == id).and_then(|r| r.check(name)).is_some_and(|c| c.passed);
        if !ok {
            problems.push(format!("criterion {id}: {name} is not at roundoff"));
        }
    }
    if problems.is_empty() {
        println!("acceptance: all checks pass apart from the two roundoff-limited step-halving ratios");
        ExitCode::SUCCESS
    } else {
        for p in &problems {
            eprintln!("{p}");
        }
        ExitCode::FAILURE
    }
}
