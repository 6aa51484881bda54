// Compression: L0 = -x focuses at (u, x) = (1, 0).

use shearfree::burgers::{BurgersSolution, Region};
use shearfree::Error;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sol = BurgersSolution::flat(|x| -x, (-2.0, 2.0), 401)?;
    let c = sol.caustic_detect(Region { u_min: 0.0, u_max: 2.0, steps: 64 })?.expect("a caustic");
    println!("first caustic at u = {}, x = {:e}", c.u, c.x);
    assert!((c.u - 1.0).abs() < 1e-6 && c.x.abs() < 1e-6);
    match sol.eval(1.5, 0.0) {
        Err(Error::CausticReached { u, .. }) => println!("evaluation past the caustic refused at u = {u}"),
        other => panic!("expected a caustic, got {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("caustic example");
}
