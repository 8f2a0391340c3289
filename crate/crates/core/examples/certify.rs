//! Replay the grid certificates for the three regions.
//!
//!     cargo run --example certify -- 1e-6

use scale_robust::solver::{self, CertifyConfig, Region, Tolerances};

fn main() -> scale_robust::Result<()> {
    let eps: f64 = std::env::args().nth(1).map_or(1e-6, |s| s.parse().expect("epsilon"));
    let sol = solver::solve_equilibrium(&Tolerances::default())?;
    let report = solver::certify(&Region::ALL, &CertifyConfig::new(eps, &sol))?;
    for v in &report.regions {
        println!(
            "{}: {:<12} extreme {:.12}  margin {:.2e}  cells {} (+{} refined)",
            v.region,
            if v.certified { "certified" } else { "UNCERTIFIED" },
            v.grid_extreme,
            v.margin,
            v.base_cells,
            v.refined_cells
        );
        println!("   {}", v.claim);
    }
    std::process::exit(if report.certified { 0 } else { 2 });
}
