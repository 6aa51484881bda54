// Scattering data on a cut of scri, its congruence, and a sheared control.

use std::sync::Arc;

use shearfree::burgers::Forcing;
use shearfree::congruence::{
    shear_report, solve_scattering, Congruence, KappaFamily, ScatteringData, ScriBox, TwistedFamily,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = ScatteringData::on_cut(|x, _| 0.3 * x.tanh(), |_, y| 0.2 * y.tanh(), (-1.0, 4.0), (-1.0, 4.0), 201);
    let domain = ScriBox { u: (0.0, 0.5), x: (1.2, 2.2), y: (1.2, 2.2), n: [4, 4, 4] };
    let t = vec![-1.0, 0.0, 1.0];
    let kappa = solve_scattering(&data, &Forcing::zero(), &Forcing::zero(), domain)?;
    println!("L(0.5, 1.5, 1.5) = {}", kappa.l(0.5, 1.5, 1.5)?);

    let c = Congruence::new(Arc::new(KappaFamily { kappa }), domain, t.clone());
    c.check_foliation(1e-3)?;
    let report = shear_report(&c, &domain, &t, 1e-3)?;
    println!("shearfree: max shear {:e}, Frobenius {:?}", report.max_shear, report.max_frobenius);

    let twisted = Congruence::new(Arc::new(TwistedFamily { inner: c.family.clone(), rate: 0.1 }), domain, t.clone());
    let control = shear_report(&twisted, &domain, &t, 1e-3)?;
    println!("twisted: max shear {:e}", control.max_shear);
    assert!(report.max_shear <= 1e-6 && control.max_shear >= 0.05);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("congruence example");
}
