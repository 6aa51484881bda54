// Two planes of T = R^4 as points of the Klein quadric.

use shearfree::klein::{null_separation, plucker_embed};
use shearfree::projlin::{join, meet, span_canonical, DEFAULT_TOL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = span_canonical(&[[1.0, 0.0, 2.0, 0.0], [0.0, 1.0, 0.0, -1.0]], DEFAULT_TOL)?;
    let b = span_canonical(&[[1.0, 0.0, 2.0, 0.0], [0.0, 0.0, 1.0, 1.0]], DEFAULT_TOL)?;
    let c = span_canonical(&[[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]], DEFAULT_TOL)?;

    let p = plucker_embed(&a)?;
    println!("plucker(a) = {:?}, relation residual {:e}", p.coords(), p.relation_residual());
    assert!(p.relation_residual().abs() <= 1e-12);

    // a and b share a line of T, so they are null separated.
    println!("a, b: separation {:e}, meet dim {}", null_separation(&a, &b)?, meet(&a, &b).dim());
    println!("a, c: separation {:e}, meet dim {}", null_separation(&a, &c)?, meet(&a, &c).dim());
    assert_eq!(meet(&a, &b).dim(), 1);
    assert_eq!(join(&a, &b).dim(), 3);
    assert!(null_separation(&a, &b)?.abs() <= 1e-12);
    assert!(null_separation(&a, &c)?.abs() > 0.1);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("plucker example");
}
