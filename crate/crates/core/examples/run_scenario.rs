// Runs a bundled scenario file the way the command-line tool does.

use std::path::Path;

use shearfree::cli::{run_scenario, Command, EXIT_OK};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/shock.scn");
    let out = std::env::temp_dir().join(format!("shearfree-example-{}", std::process::id()));
    let outcome = run_scenario(Command::Caustic, &scenario, &out);
    println!("exit {}: {}", outcome.exit_code, outcome.message);
    println!("{}", serde_json::to_string_pretty(&outcome.summary["results"])?);
    assert_eq!(outcome.exit_code, EXIT_OK);
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("scenario example");
}
