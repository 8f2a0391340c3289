//! Revenue curve toolkit: triangles, quadrilaterals, truncation, ironing and
//! the monotone hull.

use scale_robust::analytic;
use scale_robust::revcurve::{QuadParams, RevenueCurve, TriangleParams};

fn show(name: &str, c: &RevenueCurve) {
    let v: Vec<String> = c
        .vertices()
        .iter()
        .map(|p| format!("({:.3}, {:.3})", p[0], p[1]))
        .collect();
    println!("{name:<12} {}  area {:.4}", v.join(" "), c.area());
}

fn main() -> scale_robust::Result<()> {
    let tri = TriangleParams::new(0.3)?;
    show("triangle", &tri.curve()?);
    println!("  V(0.5) = {:.4}, Q(2) = {:.4}", tri.value(0.5)?, tri.quantile(2.0));

    let quad = QuadParams::new(0.2, 0.4, 2.0)?.curve()?;
    show("quad", &quad);
    show("  ironed", &quad.iron(0.2, 1.0)?);

    let c = RevenueCurve::new(vec![[0.0, 0.0], [0.25, 0.9], [0.5, 1.0], [1.0, 0.0]])?;
    show("curve", &c);
    show("  truncated", &c.truncate());
    show("  hull", &c.monotone_hull());
    println!(
        "  optimal revenue {:.4}, second price {:.4}",
        analytic::opt_revenue_curve(&c),
        2.0 * c.area()
    );
    println!("  triangulation q = {}", c.triangulate()?.q_bar());

    println!("\n{}", c.to_json());
    print!("{}", c.to_csv());
    Ok(())
}
