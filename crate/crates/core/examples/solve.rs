//! Solve the saddle point of the triangle game and print the checks.
//!
//!     cargo run --example solve

use scale_robust::solver::{self, Tolerances};

fn main() -> scale_robust::Result<()> {
    let sol = solver::solve_equilibrium(&Tolerances::default())?;
    println!("q*     = {:.10}", sol.q_star);
    println!("r*     = {:.10}", sol.r_star);
    println!("alpha* = {:.10}", sol.alpha_star);
    println!("beta   = {:.10}", sol.beta);

    let c = &sol.checks;
    println!("\nM_1(T_q*) - M_r*(T_q*)   {:+.2e}", c.equalizer_gap);
    println!("best response fixed point {:+.2e}", c.fixed_point_gap);
    println!("sweep max {:.9} at q = {}", c.sweep_max, c.sweep_argmax);
    println!("point mass ratio 1/alpha* {:.6}", c.point_mass_apx);
    Ok(())
}
