mod plucker_lines {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/plucker_lines.rs"));
}

#[test]
fn plucker_lines_runs() {
    plucker_lines::run_example().expect("plucker_lines example should run");
}

mod scri_flags {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scri_flags.rs"));
}

#[test]
fn scri_flags_runs() {
    scri_flags::run_example().expect("scri_flags example should run");
}

mod flat_burgers {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/flat_burgers.rs"));
}

#[test]
fn flat_burgers_runs() {
    flat_burgers::run_example().expect("flat_burgers example should run");
}

mod shock_caustic {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shock_caustic.rs"));
}

#[test]
fn shock_caustic_runs() {
    shock_caustic::run_example().expect("shock_caustic example should run");
}

mod forced_characteristics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/forced_characteristics.rs"));
}

#[test]
fn forced_characteristics_runs() {
    forced_characteristics::run_example().expect("forced_characteristics example should run");
}

mod dual_ode {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dual_ode.rs"));
}

#[test]
fn dual_ode_runs() {
    dual_ode::run_example().expect("dual_ode example should run");
}

mod circle_surface {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/circle_surface.rs"));
}

#[test]
fn circle_surface_runs() {
    circle_surface::run_example().expect("circle_surface example should run");
}

mod shearfree_congruence {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shearfree_congruence.rs"));
}

#[test]
fn shearfree_congruence_runs() {
    shearfree_congruence::run_example().expect("shearfree_congruence example should run");
}

mod run_scenario {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/run_scenario.rs"));
}

#[test]
fn run_scenario_runs() {
    run_scenario::run_example().expect("run_scenario example should run");
}
