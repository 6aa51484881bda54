// A point of scri with two slopes determines a null geodesic; the geodesic
// returns to the same point of scri.

use shearfree::klein::{chart_metric, flag_from_slopes, geodesic_chart_line, scri_intersection, scri_point};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (u, x, y) = (0.3, -0.7, 1.4);
    let (l, m) = (0.5, -1.25);
    let flag = flag_from_slopes(&scri_point(u, x, y), l, m)?;
    let line = geodesic_chart_line(&flag)?;
    println!("origin {:?}", line.origin.to_vec());
    println!("direction {:?}", line.direction);
    let d = line.direction;
    println!("g(k, k) = {:e}", chart_metric(&d, &d));
    assert_eq!(chart_metric(&d, &d), 0.0);

    let back = scri_intersection(&flag)?;
    println!("back on scri at ({}, {}, {})", back.u, back.x, back.y);
    assert!((back.u - u).abs() < 1e-12 && (back.x - x).abs() < 1e-12 && (back.y - y).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("scri flag example");
}
