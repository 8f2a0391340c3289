//! Approximation ratios on triangles: the second price auction against the
//! best single markup. The two cross at q*.

use scale_robust::{analytic, solver};

fn main() -> scale_robust::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>8}", "q", "APX_1", "APX_*", "best r");
    for i in 1..=20 {
        let q = 0.02 * i as f64;
        let (apx, r) = analytic::apx_star(q, analytic::R_CAP)?;
        println!("{q:>6.2} {:>10.6} {apx:>10.6} {r:>8.4}", 2.0 - q);
    }
    let q = solver::find_crossing(1e-9)?;
    println!("\ncrossing at q = {q:.10}");
    Ok(())
}
