//! The designer–adversary game over `M_{α,r}` and triangle distributions.
//!
//! [`solve_equilibrium`] first finds `q*`, where `APX_1` and `APX_*` cross,
//! with its best markup `r*`. It then picks the weight `α*` that makes
//! `T_{q*}` the adversary's best response. [`certify`] extends these point
//! evaluations to whole regions.

mod certify;

pub use certify::{certify, CertificateReport, CertifyConfig, Region, RegionVerdict};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, apx_dq, apx_mixture_triangle, markup_triangle_unchecked};
use crate::error::{Error, Result};

/// Bracket for [`find_crossing`].
pub const CROSSING_BRACKET: (f64, f64) = (1e-4, 0.5);
/// Box in which [`find_alpha`] searches.
pub const ALPHA_BRACKET: (f64, f64) = (0.8, 0.81);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Final bracket width of every bisection.
    pub bracket: f64,
    /// Allowed gap in the post-solve equilibrium checks.
    pub validation: f64,
    /// Upper end of the markup search.
    pub r_cap: f64,
    /// Grid size of the best-response scan.
    pub grid: usize,
    /// Grid size of the worst-case sweep.
    pub sweep: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bracket: 1e-9,
            validation: 1e-6,
            r_cap: analytic::R_CAP,
            grid: 4096,
            sweep: 10_000,
        }
    }
}

/// Results of the checks run after solving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumChecks {
    /// `|M_{r*}(T_{q*}) − M_1(T_{q*})|`.
    pub equalizer_gap: f64,
    /// `|best_response_quantile(α*, r*) − q*|`.
    pub fixed_point_gap: f64,
    pub sweep_max: f64,
    pub sweep_argmax: f64,
    /// Ratio at the point mass, `1/α*`.
    pub point_mass_apx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub q_star: f64,
    pub r_star: f64,
    pub alpha_star: f64,
    pub beta: f64,
    pub tolerances: Tolerances,
    pub checks: EquilibriumChecks,
    /// Grid certificate verdict; `None` until one has been run.
    pub certified: Option<bool>,
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.signum() == fhi.signum() || flo == 0.0 || fhi == 0.0 {
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        return Err(Error::BracketFailure { lo, hi });
    }
    let rising = fhi > 0.0;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `APX_1(q̄) − APX_*(q̄)`.
pub fn crossing_gap(q_bar: f64, r_cap: f64) -> Result<f64> {
    Ok(analytic::opt_revenue_truncated(q_bar) - analytic::apx_star(q_bar, r_cap)?.0)
}

/// Bisects `APX_1 − APX_*` on the default bracket down to width `tol`.
pub fn find_crossing(tol: f64) -> Result<f64> {
    find_crossing_with(tol, analytic::R_CAP)
}

pub fn find_crossing_with(tol: f64, r_cap: f64) -> Result<f64> {
    if !(tol >= 1e-9) {
        return Err(Error::param("tol", tol, "bracket width must be at least 1e-9"));
    }
    let (lo, hi) = CROSSING_BRACKET;
    bisect(|q| crossing_gap(q, r_cap), lo, hi, tol)
}

/// Adversary's best triangle against `M_{α,r}`: argmax of the ratio over
/// `q̄ ∈ [0, 1]`, located on a grid and refined by golden section and then
/// bisection on the derivative.
pub fn best_response_quantile(alpha: f64, r: f64, tol: f64) -> Result<f64> {
    best_response_quantile_with(alpha, r, tol, 4096)
}

pub fn best_response_quantile_with(alpha: f64, r: f64, tol: f64, grid: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
    }
    if !(r > 1.0) {
        return Err(Error::param("r", r, "must exceed 1"));
    }
    let f = |q: f64| (2.0 - q) / (alpha + (1.0 - alpha) * markup_triangle_unchecked(r, q));
    let node = |i: usize| i as f64 / grid as f64;
    let (best, _) = (0..=grid)
        .map(|i| (i, f(node(i))))
        .fold((0, f64::MIN), |b, p| if p.1 > b.1 { p } else { b });
    if best == grid {
        return Ok(1.0);
    }
    if best == 0 && apx_dq(alpha, r, 0.0) <= 0.0 {
        return Ok(0.0);
    }
    let lo = node(best.saturating_sub(1));
    let hi = node(best + 1);
    let (q, _) = analytic::golden_max(f, lo, hi, 1e-7);
    let (a, b) = ((q - 1e-6).max(lo), (q + 1e-6).min(hi));
    let d = |x: f64| apx_dq(alpha, r, x);
    if d(a) > 0.0 && d(b) < 0.0 {
        bisect(|x| Ok(-d(x)), a, b, tol.max(1e-15))
    } else {
        Ok(q)
    }
}

/// Weight `α` in the search box for which the best response to
/// `M_{α,r*}` is `q*`.
pub fn find_alpha(r_star: f64, q_star: f64, tol: f64) -> Result<f64> {
    let (lo, hi) = ALPHA_BRACKET;
    bisect(|a| Ok(best_response_quantile(a, r_star, 1e-13)? - q_star), lo, hi, tol)
}

/// Maximum of the ratio of `M_{α,r}` over `q̄ = i/n`, and its location.
pub fn worst_case_sweep(alpha: f64, r: f64, n: usize) -> (f64, f64) {
    let vals: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let q = i as f64 / n as f64;
            (q, apx_mixture_triangle(alpha, r, q).unwrap_or(f64::INFINITY))
        })
        .collect();
    vals.into_iter()
        .fold((f64::MIN, 0.0), |b, (q, v)| if v > b.0 { (v, q) } else { b })
}

/// Solves for `(q*, r*, α*, β)` and checks the equilibrium conditions.
pub fn solve_equilibrium(tol: &Tolerances) -> Result<EquilibriumSolution> {
    if !(tol.bracket >= 1e-9) {
        return Err(Error::param("bracket", tol.bracket, "must be at least 1e-9"));
    }
    if !(tol.validation > 0.0) {
        return Err(Error::param("validation", tol.validation, "must be positive"));
    }
    let q_star = find_crossing_with(tol.bracket, tol.r_cap)?;
    let (_, r_star) = analytic::apx_star(q_star, tol.r_cap)?;
    let alpha_star = find_alpha(r_star, q_star, tol.bracket)?;
    let beta = apx_mixture_triangle(alpha_star, r_star, q_star)?;

    let br = best_response_quantile_with(alpha_star, r_star, 1e-13, tol.grid)?;
    let (sweep_max, sweep_argmax) = worst_case_sweep(alpha_star, r_star, tol.sweep);
    let checks = EquilibriumChecks {
        equalizer_gap: (markup_triangle_unchecked(r_star, q_star) - 1.0).abs(),
        fixed_point_gap: (br - q_star).abs(),
        sweep_max,
        sweep_argmax,
        point_mass_apx: 1.0 / alpha_star,
    };
    let v = tol.validation;
    let mut failures = Vec::new();
    if checks.equalizer_gap > v {
        failures.push(format!("equalizer gap {}", checks.equalizer_gap));
    }
    if checks.fixed_point_gap > v {
        failures.push(format!("best response {br} differs from q* {q_star}"));
    }
    if (sweep_max - beta).abs() > v || (sweep_argmax - q_star).abs() > 1e-3 {
        failures.push(format!("sweep max {sweep_max} at {sweep_argmax}, beta {beta}"));
    }
    if checks.point_mass_apx >= beta {
        failures.push(format!("point mass ratio {} not below beta", checks.point_mass_apx));
    }
    if !failures.is_empty() {
        return Err(Error::Validation(failures.join("; ")));
    }
    Ok(EquilibriumSolution {
        q_star,
        r_star,
        alpha_star,
        beta,
        tolerances: *tol,
        checks,
        certified: None,
    })
}
