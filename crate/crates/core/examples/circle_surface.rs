// Tangent lines of the circle x^2 + y^2 = z^2 and the Burgers surface swept
// by the dual circle.

use std::f64::consts::TAU;

use shearfree::burgers::{circle_tangent_lines, dual_circle, surface_from_caustic};
use shearfree::projlin::HPoint;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for p in [[2.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]] {
        let lines = circle_tangent_lines(&HPoint::new(p)?);
        println!("{p:?}: {:?}", lines.iter().map(|l| *l.coords()).collect::<Vec<_>>());
    }
    let surf = surface_from_caustic(&dual_circle, (0.0, TAU), 200, 4)?;
    let caustic = surf.caustic.expect("caustic of a curve");
    let worst = caustic
        .samples
        .iter()
        .map(|e| {
            let [x, y, z] = *e.point.coords();
            (x * x + y * y - z * z).abs()
        })
        .fold(0.0, f64::max);
    println!("{} caustic samples, max |x^2 + y^2 - z^2| = {worst:e}", caustic.samples.len());
    println!("{} sheets of {} samples", surf.sheets.len(), surf.sheets[0].samples.len());
    assert!(worst <= 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("circle example");
}
