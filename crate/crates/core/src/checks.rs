//! A quick invariant suite behind the `check` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{self, markup_triangle_unchecked};
use crate::mechanisms::{check_dsic, check_scale_invariance, run_mixture, MarkupMixture, ReserveSpa};
use crate::oracle;
use crate::paradigms::{self, PricingRule};
use crate::revcurve::{QuadParams, TriangleParams};
use crate::solver::{self, Tolerances};
use crate::symmetrize::ScaledAverage;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn triangle_round_trip() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for i in 1..100 {
        let p = TriangleParams::new(i as f64 / 100.0).unwrap();
        for j in 0..100 {
            let v = (1.0 / p.q_bar()) * j as f64 / 100.0;
            let back = p.value(p.quantile(v)).unwrap();
            worst = worst.max((back - v).abs());
        }
    }
    outcome("triangle round trip", worst <= 1e-12, format!("max error {worst:e}"))
}

fn quad_continuity(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let qb = rng.gen_range(0.01..0.99);
        let r = rng.gen_range(1.01..10.0);
        let lo = QuadParams::min_q_bar_prime(qb, r);
        let hi = QuadParams::max_q_bar_prime(qb, r);
        let p = QuadParams::new(qb, rng.gen_range(lo..=hi), r).unwrap();
        let qp = p.q_bar_prime();
        let b1 = 1.0 / (r * qb);
        let piece1 = qp / (qp + b1 * r * qb * (1.0 - qp));
        worst = worst.max((piece1 - p.quantile(b1)).abs());
        worst = worst.max((p.quantile(1.0 / qb) - qb).abs());
    }
    outcome("quadrilateral continuity", worst < 1e-12, format!("max jump {worst:e}"))
}

fn hull_identity() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for i in 1..=1000 {
        let q = i as f64 / 1000.0;
        let c = TriangleParams::new(q).unwrap().curve().unwrap();
        worst = worst.max((2.0 * c.monotone_hull().area() - (2.0 - q)).abs());
    }
    outcome(
        "optimal revenue 2 - q",
        worst <= 4.0 * f64::EPSILON,
        format!("max error {worst:e}"),
    )
}

fn dual_oracle(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = rng.gen_range(1.0..16.0f64).max(1.0001);
        let q = rng.gen_range(0.01..0.99);
        let c = TriangleParams::new(q).unwrap().curve().unwrap();
        let a = markup_triangle_unchecked(r, q);
        let b = analytic::markup_revenue_curve(r, &c).unwrap();
        worst = worst.max((a - b).abs());
    }
    outcome("closed form vs quadrature", worst <= 1e-6, format!("max gap {worst:e}"))
}

fn equilibrium() -> CheckOutcome {
    match solver::solve_equilibrium(&Tolerances::default()) {
        Ok(s) => outcome(
            "equilibrium",
            true,
            format!(
                "q*={} r*={} alpha*={} beta={}",
                s.q_star, s.r_star, s.alpha_star, s.beta
            ),
        ),
        Err(e) => outcome("equilibrium", false, e.to_string()),
    }
}

fn hygiene(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let m = MarkupMixture::two_atom(rng.gen_range(0.0..1.0), rng.gen_range(1.001..8.0)).unwrap();
        let v = [rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0)];
        let o = run_mixture(&m, v[0], v[1]);
        let ok = o.alloc[0] + o.alloc[1] <= 1.0 + 1e-12
            && (0..2).all(|i| o.pay[i] >= 0.0 && o.pay[i] <= v[i] * o.alloc[i] + 1e-12)
            && run_mixture(&m, v[1], v[0]) == o.swapped()
            && check_scale_invariance(&m, v[0], v[1], rng.gen_range(0.01..100.0)).is_invariant();
        failures += usize::from(!ok);
    }
    let grid: Vec<f64> = (0..30).map(|i| 0.2 * 1.2f64.powi(i)).collect();
    let dsic = check_dsic(&MarkupMixture::two_atom(0.8, 2.45).unwrap(), &grid).len();
    outcome(
        "mechanism hygiene",
        failures == 0 && dsic == 0,
        format!("{failures} fuzz failures, {dsic} DSIC violations"),
    )
}

fn paradigm_rows() -> CheckOutcome {
    let mut bad = 0;
    for h in [std::f64::consts::E, 10.0, 100.0] {
        let rows = paradigms::paradigm_table(h).unwrap();
        for (row, rule) in rows.iter().zip(PricingRule::ALL) {
            bad += usize::from(!row.approx_eq(&paradigms::closed_form_row(rule, h), 1e-6));
        }
    }
    outcome("robust pricing table", bad == 0, format!("{bad} mismatched rows"))
}

fn symmetrization(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut bad = 0;
    let mut n = 0;
    for &l in &[1.0, 5.0, 10.0, 50.0] {
        let avg = ScaledAverage::with_panels(ReserveSpa { reserve: 1.0 }, l, 128).unwrap();
        for _ in 0..10 {
            let v = [rng.gen_range(0.05..4.0), rng.gen_range(0.05..4.0)];
            let s = 2f64.powf(rng.gen_range(-3.0..3.0));
            bad += usize::from(!avg.invariance_defect(v, s).unwrap().within(1e-8));
            n += 1;
        }
    }
    outcome("scale averaging defects", bad == 0, format!("{bad}/{n} outside bounds"))
}

fn lipschitz_bounds(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut bad = 0;
    for _ in 0..2000 {
        let r1 = rng.gen_range(1.001..12.0);
        let r2 = r1 + rng.gen_range(0.0..4.0);
        let q1 = rng.gen_range(0.0..0.95);
        let q2 = (q1 + rng.gen_range(0.0..0.05f64)).min(0.99);
        let m = |r, q| markup_triangle_unchecked(r, q);
        bad += usize::from(m(r1, q1) < analytic::bound_ratio_shift(r1, r2, m(r2, q1)) - 1e-12);
        let (lo, hi) = analytic::bound_quantile_shift_exact(q1, q2, r1, m(r1, q2));
        bad += usize::from(m(r1, q1) < lo - 1e-12 || m(r1, q1) > hi + 1e-12);
    }
    outcome("ratio and quantile shift bounds", bad == 0, format!("{bad} violations"))
}

fn convexity_box() -> CheckOutcome {
    let mut min = f64::MAX;
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let a = 0.8 + 0.01 * i as f64 / 9.0;
                let r = 2.445 + 0.004 * j as f64 / 9.0;
                let q = 0.093 + 0.001 * k as f64 / 9.0;
                min = min.min(analytic::second_derivative_inv_apx(a, r, q));
            }
        }
    }
    outcome("second derivative of 1/APX", min > 0.7, format!("min {min}"))
}

fn monte_carlo() -> CheckOutcome {
    let c = TriangleParams::new(0.3).unwrap().curve().unwrap();
    let e = oracle::mc_revenue(&MarkupMixture::spa(), &c, 200_000, 42).unwrap();
    let z = (e.mean - 1.0) / e.std_err;
    outcome(
        "Monte Carlo second price",
        z.abs() <= 4.0,
        format!("mean {} ({z:.2} s.e.)", e.mean),
    )
}

/// Runs every check; deterministic for a fixed `seed`.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        triangle_round_trip(),
        quad_continuity(&mut rng),
        hull_identity(),
        dual_oracle(&mut rng),
        equilibrium(),
        hygiene(&mut rng),
        paradigm_rows(),
        symmetrization(&mut rng),
        lipschitz_bounds(&mut rng),
        convexity_box(),
        monte_carlo(),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn suite_is_green() {
        for c in super::run_all(7) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
