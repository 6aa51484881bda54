// Swapping dynamical variables and constants of x'' = x'^2.

use shearfree::burgers::{dual_ode_extract, DualGrid, Forcing};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = DualGrid::uniform((0.5, 1.0, 3), (-0.2, 0.2, 3), (-0.1, 0.1, 3));
    let straight = dual_ode_extract(&Forcing::zero(), 0.0, &grid, 1e-3)?;
    println!("x'' = 0: max |b''| = {:e}", straight.max_abs_second());

    let curved = dual_ode_extract(&Forcing::cubic([0.0, 0.0, 1.0, 0.0]), 0.0, &grid, 1e-3)?;
    for s in curved.samples.iter().take(3) {
        let exact = (1.0 - (s.a - s.x).exp()) / s.u;
        println!("(u, x, a) = ({}, {}, {}): b = {:.9} (closed form {:.9}), b'' = {:.6}", s.u, s.x, s.a, s.b, exact, s.b_second);
    }
    assert!(straight.max_abs_second() < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("dual ODE example");
}
