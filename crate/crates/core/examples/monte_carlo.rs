//! Monte Carlo against the deterministic revenue formulas on the standing
//! 20-pair matrix.
//!
//!     cargo run --release --example monte_carlo -- 1000000

use scale_robust::oracle;

fn main() -> scale_robust::Result<()> {
    let n: u64 = std::env::args()
        .nth(1)
        .map_or(1_000_000, |s| s.parse().expect("sample count"));
    println!(
        "{:<38} {:<18} {:>10} {:>10} {:>8}",
        "mechanism", "distribution", "exact", "estimate", "z"
    );
    for row in oracle::run_matrix(n, 42)? {
        println!(
            "{:<38} {:<18} {:>10.6} {:>10.6} {:>8.2}",
            row.mechanism, row.dist, row.exact, row.estimate.mean, row.z
        );
    }
    Ok(())
}
