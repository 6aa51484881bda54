// Rarefaction: L0 = x gives L = x/(1+u).

use shearfree::burgers::BurgersSolution;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sol = BurgersSolution::flat(|x| x, (-10.0, 10.0), 401)?;
    let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for u in [0.0, 0.5, 2.0] {
        let ls = sol.eval_level(u, &xs)?;
        println!("u = {u}: {ls:?}");
        for (x, l) in xs.iter().zip(ls) {
            assert!((l - x / (1.0 + u)).abs() < 1e-12);
        }
    }
    println!("residual at (1, 0.5): {:e}", sol.residual(1.0, 0.5, 1e-3)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("flat Burgers example");
}
