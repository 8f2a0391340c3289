//! Markup mixtures on value profiles, with the DSIC and scale checks run
//! against a first-price control.

use scale_robust::mechanisms::{check_dsic, check_scale_invariance, FirstPrice, MarkupMixture, Mechanism, ReserveSpa};
use scale_robust::reference::{ALPHA_STAR, R_STAR};

fn main() -> scale_robust::Result<()> {
    let m = MarkupMixture::two_atom(ALPHA_STAR, R_STAR)?;
    println!("{}", m.label());
    for v in [[1.0, 3.0], [1.0, 2.0], [5.0, 5.0], [0.0, 4.0]] {
        let o = m.outcome(v);
        println!(
            "  v = {v:?}: alloc {:?} pay {:?} revenue {:.6}",
            o.alloc,
            o.pay,
            o.revenue()
        );
    }

    let grid: Vec<f64> = (1..=25).map(|i| 0.4 * i as f64).collect();
    println!("\nprofitable misreports on a 25-point grid");
    println!("  mixture      {}", check_dsic(&m, &grid).len());
    println!(
        "  reserve SPA  {}",
        check_dsic(&ReserveSpa { reserve: 1.0 }, &grid).len()
    );
    println!("  first price  {}", check_dsic(&FirstPrice, &grid).len());

    println!("\nscale defect at v = (0.5, 0.6), k = 10");
    println!("  mixture      {:?}", check_scale_invariance(&m, 0.5, 0.6, 10.0));
    println!(
        "  reserve SPA  {:?}",
        check_scale_invariance(&ReserveSpa { reserve: 1.0 }, 0.5, 0.6, 10.0)
    );
    Ok(())
}
