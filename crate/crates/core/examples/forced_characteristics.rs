// Characteristics of x'' = σ(u, x, x') for two forcings with closed forms.

use shearfree::burgers::{characteristic_trace, Forcing};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = 0.5;
    let fall = characteristic_trace(&Forcing::constant(g), 0.0, 0.0, 1.0, 1.0, 0.1)?;
    let end = fall.last().expect("nonempty");
    println!("x'' = g: x(1) = {} (exact {})", end.x, 1.0 + 0.5 * g);

    // x'' = x' has x = x0 + p0 (e^u - 1).
    let drag = Forcing::cubic([0.0, 1.0, 0.0, 0.0]);
    for step in [0.1, 0.05] {
        let end = *characteristic_trace(&drag, 0.0, 0.0, 1.0, 1.0, step)?.last().expect("nonempty");
        println!("x'' = x', step {step}: error {:e}", (end.x - 1f64.exp_m1()).abs());
    }
    assert!((end.x - (1.0 + 0.5 * g)).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("characteristics example");
}
