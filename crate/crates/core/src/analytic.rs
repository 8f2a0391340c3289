//! Revenues and approximation ratios. Triangles and quadrilaterals have
//! closed forms; other curves go through quadrature. The shift bounds at the
//! end feed `certify`.

use crate::error::{Error, Result};
use crate::mechanisms::MarkupMixture;
use crate::quadrature;
use crate::revcurve::{QuadParams, RevenueCurve};

/// Absolute tolerance requested from the adaptive quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Default upper end of the markup search in [`apx_star`].
pub const R_CAP: f64 = 64.0;

/// Optimal revenue for two agents from a truncated normalized distribution
/// with monopoly quantile `q̄`.
pub fn opt_revenue_truncated(q_bar: f64) -> f64 {
    2.0 - q_bar
}

/// Second-price revenue on any normalized triangle.
pub fn spa_revenue_triangle(_q_bar: f64) -> f64 {
    1.0
}

// Σ_{k≥0} x^k/(k+2) = (−ln(1−x) − x)/x².
fn log_tail(x: f64) -> f64 {
    if x < 1e-2 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..24 {
            sum += term / (k as f64 + 2.0);
            term *= x;
        }
        sum
    } else {
        (-(-x).ln_1p() - x) / (x * x)
    }
}

/// `M_r(T_q̄)` without argument checks; 0 at `q̄ = 1`.
#[inline]
pub(crate) fn markup_triangle_unchecked(r: f64, q_bar: f64) -> f64 {
    let a = 1.0 - q_bar;
    if a <= 0.0 {
        return 0.0;
    }
    let d = 1.0 + q_bar * (r - 1.0);
    let x = a * (r - 1.0) / r;
    2.0 * a / d - (2.0 * a / r) * log_tail(x)
}

/// Revenue of the `r`-markup mechanism on `T_q̄` for `r > 1`.
///
/// Algebraically equal to
/// `2r/((1−q̄)(r−1)) · ((1−q̄)/(1−q̄+q̄r) + ln(r/(1−q̄+q̄r))/(1−r))`, evaluated
/// in a form that does not cancel as `r → 1` or `q̄ → 1`. The value tends to
/// `1 − q̄` as `r → 1⁺`, not to the second-price revenue 1.
pub fn markup_revenue_triangle(r: f64, q_bar: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::param(
            "r",
            r,
            "markup revenue needs r > 1; use spa_revenue_triangle",
        ));
    }
    if !(0.0..1.0).contains(&q_bar) {
        return Err(Error::param("q_bar", q_bar, "must lie in [0, 1)"));
    }
    Ok(markup_triangle_unchecked(r, q_bar))
}

/// Textbook evaluation of the same closed form; loses precision near `r = 1`.
pub fn markup_revenue_triangle_direct(r: f64, q_bar: f64) -> f64 {
    let a = 1.0 - q_bar;
    let d = a + q_bar * r;
    2.0 * r / (a * (r - 1.0)) * (a / d + (r / d).ln() / (1.0 - r))
}

/// `∂M_r(T_q̄)/∂q̄`.
pub fn markup_revenue_triangle_dq(r: f64, q_bar: f64) -> f64 {
    let a = 1.0 - q_bar;
    let d = 1.0 + q_bar * (r - 1.0);
    let l = (r / d).ln();
    2.0 * r / (r - 1.0) * (-(r - 1.0) / (d * d) + 1.0 / (d * a) - l / ((r - 1.0) * a * a))
}

/// Revenue of a single ratio on `T_q̄`, dispatching `r = 1` to the
/// second-price value.
pub fn ratio_revenue_triangle(r: f64, q_bar: f64) -> Result<f64> {
    if r == 1.0 {
        Ok(spa_revenue_triangle(q_bar))
    } else {
        markup_revenue_triangle(r, q_bar)
    }
}

/// Mixture revenue on `T_q̄` from the closed forms.
pub fn mixture_revenue_triangle(m: &MarkupMixture, q_bar: f64) -> Result<f64> {
    if q_bar == 1.0 {
        // Point mass at 1: only second-price atoms sell.
        return Ok(m.atoms().iter().filter(|a| a.r == 1.0).map(|a| a.w).sum());
    }
    m.atoms()
        .iter()
        .map(|a| ratio_revenue_triangle(a.r, q_bar).map(|v| a.w * v))
        .sum()
}

/// Second-price revenue on a quadrilateral, `q̄' + (1−q̄)·q̄'/(r q̄)`.
pub fn spa_revenue_quad(p: &QuadParams) -> f64 {
    let (qb, qp, r) = (p.q_bar(), p.q_bar_prime(), p.r());
    qp + (1.0 - qb) * qp / (r * qb)
}

/// `∂/∂q̄'` of [`spa_revenue_quad`].
pub fn spa_revenue_quad_dqp(p: &QuadParams) -> f64 {
    1.0 + (1.0 - p.q_bar()) / (p.r() * p.q_bar())
}

/// Markup revenue `2∫₀¹ P_c(r·V_c(q)) dq` on an arbitrary curve; `r = 1` is
/// twice the area under the curve.
pub fn markup_revenue_curve(r: f64, c: &RevenueCurve) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::param("r", r, "must be at least 1"));
    }
    if r == 1.0 {
        return Ok(2.0 * c.area());
    }
    Ok(2.0 * markup_integral(r, c).value)
}

/// The integral behind [`markup_revenue_curve`] with its error estimate.
pub fn markup_integral(r: f64, c: &RevenueCurve) -> quadrature::Integral {
    let top = c.top_price();
    let f = |q: f64| {
        if q <= 0.0 {
            return 0.0;
        }
        c.price_revenue(r * c.price_unchecked(q))
    };
    let mut bps: Vec<f64> = Vec::with_capacity(2 * c.vertices().len() + 1);
    for p in &c.vertices()[1..] {
        bps.push(p[0]);
        bps.push(c.quantile_at_price(p[1] / p[0] / r));
    }
    bps.push(c.quantile_at_price(top / r));
    quadrature::integrate(f, 0.0, 1.0, &bps, QUAD_TOL / 2.0)
}

/// `Σ w·M_r(c)` over the atoms.
pub fn mixture_revenue(m: &MarkupMixture, c: &RevenueCurve) -> Result<f64> {
    m.atoms()
        .iter()
        .map(|a| markup_revenue_curve(a.r, c).map(|v| a.w * v))
        .sum()
}

/// Optimal revenue for two agents: twice the area under the monotone hull.
pub fn opt_revenue_curve(c: &RevenueCurve) -> f64 {
    2.0 * c.monotone_hull().area()
}

/// Approximation ratio of `M_{α,r}` against `T_q̄`.
pub fn apx_mixture_triangle(alpha: f64, r: f64, q_bar: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", alpha, "must lie in [0, 1]"));
    }
    if !(r > 1.0) {
        return Err(Error::param("r", r, "must exceed 1"));
    }
    if !(0.0..=1.0).contains(&q_bar) {
        return Err(Error::param("q_bar", q_bar, "must lie in [0, 1]"));
    }
    let rev = alpha + (1.0 - alpha) * markup_triangle_unchecked(r, q_bar);
    if rev <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(opt_revenue_truncated(q_bar) / rev)
}

/// Approximation ratio of an arbitrary mixture on an arbitrary curve.
pub fn apx_mixture_curve(m: &MarkupMixture, c: &RevenueCurve) -> Result<f64> {
    let rev = mixture_revenue(m, c)?;
    Ok(opt_revenue_curve(c) / rev)
}

pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 > best.1 { p } else { best })
}

/// Largest markup revenue on `T_q̄` over `r ∈ (1, r_cap]`.
pub fn best_markup_revenue(q_bar: f64, r_cap: f64) -> Result<(f64, f64)> {
    if !(q_bar > 0.0 && q_bar < 1.0) {
        return Err(Error::param(
            "q_bar",
            q_bar,
            "supremum over r is attained only for q_bar in (0, 1)",
        ));
    }
    if !(r_cap >= 2.0) {
        return Err(Error::param("r_cap", r_cap, "must be at least 2"));
    }
    const GRID: usize = 256;
    let ln_cap = r_cap.ln();
    let node = |i: usize| (ln_cap * i as f64 / GRID as f64).exp();
    let f = |r: f64| markup_triangle_unchecked(r, q_bar);
    let (best_i, _) = (1..=GRID)
        .map(|i| (i, f(node(i))))
        .fold((1, f64::MIN), |b, p| if p.1 > b.1 { p } else { b });
    let lo = node(best_i - 1).max(1.0 + 1e-12);
    let hi = node((best_i + 1).min(GRID));
    let (r, m) = golden_max(f, lo, hi, 1e-11 * hi);
    Ok((r, m))
}

/// `APX_*(q̄)`: ratio of the best single markup against `T_q̄`, and its markup.
pub fn apx_star(q_bar: f64, r_cap: f64) -> Result<(f64, f64)> {
    let (r, m) = best_markup_revenue(q_bar, r_cap)?;
    Ok((opt_revenue_truncated(q_bar) / m, r))
}

/// Lower bound on `M_{r1}` from `M_{r2}` for `1 ≤ r1 ≤ r2`.
pub fn bound_ratio_shift(r1: f64, r2: f64, rev_at_r2: f64) -> f64 {
    r1 / r2 * rev_at_r2
}

/// Bounds on `M_r(T_{q̄1})` from `M_r(T_{q̄2})` for `q̄1 ≤ q̄2`:
/// `((1−q̄2)/(1−q̄1))·rev` below and `2(q̄2−q̄1) + rev` above.
///
/// The upper side does not hold in general: the price quantile moves faster
/// than `q̄` when `r/(1+q̄(r−1))² > 1`. See [`bound_quantile_shift_exact`].
pub fn bound_quantile_shift(q1: f64, q2: f64, rev_at_q2: f64) -> (f64, f64) {
    let lower = (1.0 - q2) / (1.0 - q1) * rev_at_q2;
    let upper = 2.0 * (q2 - q1) + rev_at_q2;
    (lower, upper)
}

/// Quantile of the price `V(q̄)/r` under `T_q̄`, `r q̄/(1 − q̄ + r q̄)`.
/// Opponents with a smaller quantile face a markup price above the support.
pub fn q_hat_inverse_ratio(q_bar: f64, r: f64) -> f64 {
    r * q_bar / (1.0 - q_bar + r * q_bar)
}

/// Same lower side as [`bound_quantile_shift`], with the upper side
/// `2(Q̂(q̄2) − Q̂(q̄1)) + rev` where `Q̂(q̄) = r q̄/(1−q̄+r q̄)`.
pub fn bound_quantile_shift_exact(q1: f64, q2: f64, r: f64, rev_at_q2: f64) -> (f64, f64) {
    let lower = (1.0 - q2) / (1.0 - q1) * rev_at_q2;
    let upper = 2.0 * (q_hat_inverse_ratio(q2, r) - q_hat_inverse_ratio(q1, r)) + rev_at_q2;
    (lower, upper)
}

/// `1/APX` for `M_{α,r}` on `T_q̄`.
pub fn inv_apx(alpha: f64, r: f64, q_bar: f64) -> f64 {
    (alpha + (1.0 - alpha) * markup_triangle_unchecked(r, q_bar)) / (2.0 - q_bar)
}

/// `∂/∂q̄` of `APX` for `M_{α,r}` on `T_q̄`.
pub fn apx_dq(alpha: f64, r: f64, q_bar: f64) -> f64 {
    let n = alpha + (1.0 - alpha) * markup_triangle_unchecked(r, q_bar);
    let dn = (1.0 - alpha) * markup_revenue_triangle_dq(r, q_bar);
    (-n - (2.0 - q_bar) * dn) / (n * n)
}

/// `∂²(1/APX)/∂q̄²` for `M_{α,r}` on `T_q̄`, as `N''/W + 2N'/W² + 2N/W³`
/// with `N` the mixture revenue and `W = 2 − q̄`.
pub fn second_derivative_inv_apx(alpha: f64, r: f64, q_bar: f64) -> f64 {
    let a = 1.0 - q_bar;
    let d = 1.0 + q_bar * (r - 1.0);
    let w = 2.0 - q_bar;
    let l = (r / d).ln();
    let rm = r - 1.0;
    let t1 = 4.0 * (1.0 - alpha) * r * (-rm / (d * d) + 1.0 / (a * d) - l / (rm * a * a)) / (rm * w * w);
    let t2 = 2.0
        * (1.0 - alpha)
        * r
        * (2.0 * rm * rm / (d * d * d) - rm / (a * d * d) + 2.0 / (a * a * d) - 2.0 * l / (rm * a * a * a))
        / (rm * w);
    let t3 = (4.0 * (1.0 - alpha) * r * (1.0 / d - l / (rm * a)) + 2.0 * alpha * rm) / (rm * w * w * w);
    t1 + t2 + t3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::*;
    use crate::revcurve::TriangleParams;
    use proptest::prelude::*;

    fn tri_curve(q: f64) -> RevenueCurve {
        TriangleParams::new(q).unwrap().curve().unwrap()
    }

    #[test]
    fn opt_and_spa_examples() {
        assert!((opt_revenue_truncated(Q_STAR) - BETA).abs() < 1e-15);
        assert_eq!(opt_revenue_truncated(1.0), 1.0);
        assert_eq!(opt_revenue_truncated(0.0), 2.0);
        for q in [0.0, 0.5, 1.0, Q_STAR] {
            assert_eq!(spa_revenue_triangle(q), 1.0);
        }
        assert!((markup_revenue_curve(1.0, &tri_curve(0.5)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn markup_triangle_examples() {
        assert!((markup_revenue_triangle(R_STAR, Q_STAR).unwrap() - 1.0).abs() < 1e-6);
        let want = 4.0 * (1.0 - 2f64.ln());
        assert!((markup_revenue_triangle(2.0, 0.0).unwrap() - want).abs() < 1e-14);
        assert!((want - 1.227411).abs() < 1e-6);
        let r: f64 = 2.0;
        let simplified = 2.0 * r / (r - 1.0) * (1.0 - r.ln() / (r - 1.0));
        assert!((want - simplified).abs() < 1e-14);
        assert!((markup_revenue_triangle(1e6, 0.0).unwrap() - 2.0).abs() < 1e-4);
        assert!(markup_revenue_triangle(1.0, 0.3).is_err());
        assert!(markup_revenue_triangle(2.0, 1.0).is_err());
    }

    #[test]
    fn stable_form_matches_direct_form() {
        for &q in &[0.0, 0.01, 0.2, 0.5, 0.9] {
            for &r in &[1.5, 2.0, 3.0, 10.0, 100.0] {
                let a = markup_revenue_triangle(r, q).unwrap();
                let b = markup_revenue_triangle_direct(r, q);
                assert!((a - b).abs() < 1e-12 * b.abs().max(1.0), "r={r} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn limits_near_one() {
        for &q in &[0.0, 0.3, 0.8] {
            let m = markup_revenue_triangle(1.0 + 1e-12, q).unwrap();
            assert!((m - (1.0 - q)).abs() < 1e-9, "{m}");
        }
        assert!(markup_revenue_triangle(3.0, 1.0 - 1e-12).unwrap() < 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(r, q) in &[(2.4469452, 0.0931057), (1.3, 0.5), (8.0, 0.02)] {
            let h = 1e-6;
            let fd = (markup_triangle_unchecked(r, q + h) - markup_triangle_unchecked(r, q - h)) / (2.0 * h);
            assert!((fd - markup_revenue_triangle_dq(r, q)).abs() < 1e-7);
            let fd = (2.0 - q - h) / (0.8 + 0.2 * markup_triangle_unchecked(r, q + h))
                - (2.0 - q + h) / (0.8 + 0.2 * markup_triangle_unchecked(r, q - h));
            assert!((fd / (2.0 * h) - apx_dq(0.8, r, q)).abs() < 1e-7);
        }
    }

    #[test]
    fn quad_spa_examples() {
        let p = QuadParams::new(0.2, 0.4, 2.0).unwrap();
        assert!((spa_revenue_quad(&p) - 1.2).abs() < 1e-15);
        assert!((spa_revenue_quad(&p) - 2.0 * p.curve().unwrap().area()).abs() < 1e-15);
        let lo = QuadParams::min_q_bar_prime(0.3, 2.5);
        assert!((spa_revenue_quad(&QuadParams::new(0.3, lo, 2.5).unwrap()) - 1.0).abs() < 1e-14);
        assert!((spa_revenue_quad_dqp(&QuadParams::new(0.2, 0.35, 2.0).unwrap()) - 3.0).abs() < 1e-15);
        let p = QuadParams::new(0.2, 0.35, 2.0).unwrap();
        let h = 1e-6;
        let up = QuadParams::new(0.2, 0.35 + h, 2.0).unwrap();
        assert!(((spa_revenue_quad(&up) - spa_revenue_quad(&p)) / h - 3.0).abs() < 1e-6);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let c = tri_curve(Q_STAR);
        let m = markup_revenue_curve(R_STAR, &c).unwrap();
        assert!((m - 1.0).abs() < 1e-6);
        assert!((m - markup_revenue_triangle(R_STAR, Q_STAR).unwrap()).abs() < 1e-9);
        let i = markup_integral(R_STAR, &c);
        assert!(i.abs_err < 1e-9);
    }

    #[test]
    fn mixture_examples() {
        let m = MarkupMixture::two_atom(ALPHA_STAR, R_STAR).unwrap();
        assert!((mixture_revenue(&m, &tri_curve(Q_STAR)).unwrap() - 1.0).abs() < 1e-6);
        let pm = TriangleParams::point_mass().curve().unwrap();
        assert!((mixture_revenue(&m, &pm).unwrap() - ALPHA_STAR).abs() < 1e-12);
        assert!((mixture_revenue_triangle(&m, 1.0).unwrap() - ALPHA_STAR).abs() < 1e-15);
        let single = MarkupMixture::markup(3.0).unwrap();
        let c = tri_curve(0.2);
        assert!((mixture_revenue(&single, &c).unwrap() - markup_revenue_curve(3.0, &c).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn apx_examples() {
        let b = apx_mixture_triangle(ALPHA_STAR, R_STAR, Q_STAR).unwrap();
        assert!((b - BETA).abs() < 1e-6);
        for q in [0.0, 0.3, 0.9] {
            assert!((apx_mixture_triangle(1.0, 3.0, q).unwrap() - (2.0 - q)).abs() < 1e-15);
        }
        let near = apx_mixture_triangle(ALPHA_STAR, R_STAR, 1.0 - 1e-9).unwrap();
        assert!((near - 1.0 / ALPHA_STAR).abs() < 1e-6);
        assert!((1.0 / ALPHA_STAR - 1.241).abs() < 1e-3);
    }

    #[test]
    fn apx_star_examples() {
        let (ratio, r) = apx_star(Q_STAR, R_CAP).unwrap();
        assert!((r - R_STAR).abs() < 1e-5, "{r}");
        assert!((ratio - BETA).abs() < 1e-6, "{ratio}");
        let (ratio, r) = apx_star(0.5, R_CAP).unwrap();
        for i in 1..=500 {
            let rr = 1.0 + 15.0 * i as f64 / 500.0;
            assert!(1.5 / markup_triangle_unchecked(rr, 0.5) >= ratio - 1e-12);
        }
        assert!(r < 11.0);
        for q in [0.093, 0.2, 0.6, 0.95] {
            assert!(markup_revenue_triangle(11.0, q).unwrap() < 1.0);
            assert!(apx_star(q, R_CAP).unwrap().1 < 11.0);
        }
        assert!(apx_star(0.0, R_CAP).is_err());
    }

    #[test]
    fn shift_bound_examples() {
        assert!((bound_ratio_shift(2.0, 2.1, 1.05) - 1.0).abs() < 1e-15);
        assert_eq!(bound_ratio_shift(2.0, 2.0, 0.7), 0.7);
        assert_eq!(bound_quantile_shift(0.3, 0.3, 0.8), (0.8, 0.8));
        let (lo, hi) = bound_quantile_shift(0.0, 0.1, 1.0);
        assert!((lo - 0.9).abs() < 1e-15 && (hi - 1.2).abs() < 1e-15);
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        for &(a, r, q) in &[(0.8, 2.445, 0.093), (0.81, 2.449, 0.094), (0.805, 2.447, 0.0935)] {
            let h = 1e-4;
            let fd = (inv_apx(a, r, q + h) - 2.0 * inv_apx(a, r, q) + inv_apx(a, r, q - h)) / (h * h);
            let exact = second_derivative_inv_apx(a, r, q);
            assert!((fd - exact).abs() <= 1e-4 * exact.abs(), "{fd} vs {exact}");
        }
    }

    #[test]
    fn second_derivative_positive_on_box() {
        let mut min = f64::MAX;
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    let a = 0.8 + 0.01 * i as f64 / 9.0;
                    let r = 2.445 + 0.004 * j as f64 / 9.0;
                    let q = 0.093 + 0.001 * k as f64 / 9.0;
                    min = min.min(second_derivative_inv_apx(a, r, q));
                }
            }
        }
        assert!(min > 0.7, "{min}");
    }

    proptest! {
        #[test]
        fn closed_form_equals_quadrature(r in 1.001f64..16.0, q in 0.01f64..0.99) {
            let a = markup_revenue_triangle(r, q).unwrap();
            let b = markup_revenue_curve(r, &tri_curve(q)).unwrap();
            prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
        }

        #[test]
        fn ratio_shift_lower_bound(r1 in 1.0001f64..16.0, dr in 0.0f64..10.0, q in 0.0f64..0.99) {
            let r2 = r1 + dr;
            let m1 = markup_triangle_unchecked(r1, q);
            let m2 = markup_triangle_unchecked(r2, q);
            prop_assert!(m1 >= bound_ratio_shift(r1, r2, m2) - 1e-12);
        }

        #[test]
        fn exact_quantile_shift_sandwich(r in 1.0001f64..16.0, q1 in 0.0f64..0.98, dq in 0.0f64..0.2) {
            let q2 = (q1 + dq).min(0.99);
            let m1 = markup_triangle_unchecked(r, q1);
            let (lo, hi) = bound_quantile_shift_exact(q1, q2, r, markup_triangle_unchecked(r, q2));
            prop_assert!(lo <= m1 + 1e-12 && m1 <= hi + 1e-12, "{} {} {}", lo, m1, hi);
        }
    }
}
