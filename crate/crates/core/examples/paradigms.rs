//! Robust single-buyer pricing: max-min, ratio-optimal and regret-optimal.
//!
//!     cargo run --example paradigms -- 100

use scale_robust::paradigms::{self, PriceDistribution, PricingRule};

fn main() -> scale_robust::Result<()> {
    let h: f64 = std::env::args().nth(1).map_or(100.0, |s| s.parse().expect("H"));
    let rows = paradigms::paradigm_table(h)?;
    print!("{}", paradigms::render_table(h, &rows));

    println!("\nrevenue against a point mass at v");
    for v in [1.0, h.sqrt(), h / std::f64::consts::E, h] {
        let r: Vec<String> = PricingRule::ALL
            .iter()
            .map(|rule| format!("{:.4}", PriceDistribution::new(*rule, h).unwrap().revenue(v)))
            .collect();
        println!("  v = {v:>8.3}: {}", r.join("  "));
    }
    Ok(())
}
