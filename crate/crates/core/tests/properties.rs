use proptest::prelude::*;

use scale_robust::analytic::{self, markup_revenue_triangle};
use scale_robust::mechanisms::{MarkupMixture, Mechanism};
use scale_robust::paradigms::{PriceDistribution, PricingRule};
use scale_robust::reference::{ALPHA_STAR, BETA, R_STAR};
use scale_robust::revcurve::{QuadParams, RevenueCurve, TriangleParams};
use scale_robust::symmetrize::ScaledAverage;

/// Concave curve through the origin built from decreasing slopes.
fn build_curve(mut pts: Vec<(f64, f64)>) -> Option<RevenueCurve> {
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
    let mut slopes: Vec<f64> = pts.iter().map(|p| p.1).collect();
    slopes.push(slopes.last().copied().unwrap_or(0.0) - 1.0);
    slopes.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut qs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    qs.push(1.0);
    let mut v = vec![[0.0, 0.0]];
    let mut prev = 0.0;
    for (q, s) in qs.iter().zip(&slopes) {
        let r = v.last().unwrap()[1] + s * (q - prev);
        v.push([*q, r]);
        prev = *q;
    }
    if v.iter().any(|p| p[1] < 0.0) || v.iter().all(|p| p[1] < 1e-3) {
        return None;
    }
    RevenueCurve::new(v).ok()
}

fn curve() -> impl Strategy<Value = RevenueCurve> {
    prop::collection::vec((0.01..0.99f64, -4.0..8.0f64), 1..6).prop_filter_map("not a curve", build_curve)
}

fn is_concave(c: &RevenueCurve) -> bool {
    RevenueCurve::new(c.vertices().to_vec()).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn triangle_round_trip(q in 0.001..0.999f64, t in 0.0..1.0f64) {
        let p = TriangleParams::new(q).unwrap();
        let v = t / q;
        prop_assert!((p.value(p.quantile(v)).unwrap() - v).abs() <= 1e-12 * v.max(1.0));
    }

    #[test]
    fn quad_quantile_continuous(q in 0.01..0.99f64, r in 1.01..10.0f64, t in 0.0..=1.0f64) {
        let (lo, hi) = (QuadParams::min_q_bar_prime(q, r), QuadParams::max_q_bar_prime(q, r));
        let p = QuadParams::new(q, lo + t * (hi - lo), r).unwrap();
        for b in [1.0 / (r * q), 1.0 / q] {
            prop_assert!((p.quantile(b) - p.quantile(b.next_down())).abs() < 1e-12);
        }
    }

    #[test]
    fn minimal_quad_is_triangle(q in 0.01..0.99f64, r in 1.01..10.0f64) {
        let quad = QuadParams::new(q, QuadParams::min_q_bar_prime(q, r), r).unwrap().curve().unwrap();
        let tri = TriangleParams::new(q).unwrap().curve().unwrap();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            prop_assert!((quad.value(x) - tri.value(x)).abs() < 1e-12);
        }
        prop_assert_eq!(quad.simplify().vertices().len(), 3);
    }

    #[test]
    fn truncate_and_iron_keep_concavity(c in curve(), a in 0.0..1.0f64, w in 0.0..1.0f64) {
        let t = c.truncate();
        prop_assert!(is_concave(&t));
        prop_assert!(t.area() <= c.area() + 1e-15);
        prop_assert_eq!(t.peak(), c.peak());
        let b = a + (1.0 - a) * w;
        if b > a {
            let ir = c.iron(a, b).unwrap();
            prop_assert!(ir.area() <= c.area() + 1e-15);
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                prop_assert!(ir.value(x) <= c.value(x) + 1e-12);
            }
        }
    }

    #[test]
    fn hull_is_smallest_monotone_concave_majorant(c in curve()) {
        let h = c.monotone_hull();
        let (qb, rmax) = c.peak();
        prop_assert!(is_concave(&h));
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            prop_assert!(h.value(x) >= c.value(x) - 1e-12);
            if x <= qb {
                prop_assert!((h.value(x) - c.value(x)).abs() <= 1e-12);
            } else {
                prop_assert!((h.value(x) - rmax).abs() <= 1e-12);
            }
        }
        prop_assert!((analytic::opt_revenue_curve(&c) - 2.0 * h.area()).abs() < 1e-15);
    }

    #[test]
    fn optimal_revenue_of_triangle(i in 1usize..=1000) {
        let q = i as f64 / 1000.0;
        let c = TriangleParams::new(q).unwrap().curve().unwrap();
        prop_assert!((2.0 * c.monotone_hull().area() - (2.0 - q)).abs() <= 4.0 * f64::EPSILON);
        prop_assert!((c.area() - 0.5).abs() <= f64::EPSILON);
    }

    #[test]
    fn serialization_round_trips(c in curve()) {
        prop_assert_eq!(RevenueCurve::from_json(&c.to_json()).unwrap(), c.clone());
        prop_assert_eq!(RevenueCurve::from_csv(&c.to_csv()).unwrap(), c);
    }

    #[test]
    fn closed_form_matches_quadrature(r in 1.0001..16.0f64, q in 0.01..0.99f64) {
        let a = markup_revenue_triangle(r, q).unwrap();
        let b = analytic::markup_revenue_curve(r, &TriangleParams::new(q).unwrap().curve().unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-6, "{} {}", a, b);
    }

    #[test]
    fn spa_revenue_is_twice_area(c in curve()) {
        let m = analytic::markup_revenue_curve(1.0, &c).unwrap();
        prop_assert!((m - 2.0 * c.area()).abs() < 1e-12);
    }

    #[test]
    fn ratio_shift(r1 in 1.0001..12.0f64, d in 0.0..4.0f64, q in 0.0..0.99f64) {
        let r2 = r1 + d;
        let m1 = markup_revenue_triangle(r1, q).unwrap();
        let m2 = markup_revenue_triangle(r2, q).unwrap();
        prop_assert!(m1 >= analytic::bound_ratio_shift(r1, r2, m2) - 1e-12);
    }

    #[test]
    fn ratio_shift_on_general_curves(c in curve(), r1 in 1.0..6.0f64, d in 0.0..4.0f64) {
        let r2 = r1 + d;
        let m1 = analytic::markup_revenue_curve(r1, &c).unwrap();
        let m2 = analytic::markup_revenue_curve(r2, &c).unwrap();
        prop_assert!(m1 >= r1 / r2 * m2 - 1e-9);
    }

    #[test]
    fn quantile_shift_sound_sides(r in 1.0001..12.0f64, q1 in 0.0..0.95f64, d in 0.0..0.05f64) {
        let q2 = (q1 + d).min(0.99);
        let m = |q| markup_revenue_triangle(r, q).unwrap();
        let (lo, _) = analytic::bound_quantile_shift(q1, q2, m(q2));
        prop_assert!(m(q1) >= lo - 1e-12);
        let (lo, hi) = analytic::bound_quantile_shift_exact(q1, q2, r, m(q2));
        prop_assert!(lo - 1e-12 <= m(q1) && m(q1) <= hi + 1e-12);
    }

    #[test]
    fn optimal_mixture_never_exceeds_beta(q in 0.0..0.999f64) {
        let apx = analytic::apx_mixture_triangle(ALPHA_STAR, R_STAR, q).unwrap();
        prop_assert!(apx <= BETA + 1e-6, "{}", apx);
    }

    #[test]
    fn scale_average_of_invariant_base(
        w in 0.05..0.95f64, r in 1.01..6.0f64, l in 0.1..20.0f64,
        v1 in 0.01..10.0f64, v2 in 0.01..10.0f64,
    ) {
        let m = MarkupMixture::two_atom(w, r).unwrap();
        let avg = ScaledAverage::with_panels(m.clone(), l, 64).unwrap();
        let (a, b) = (avg.averaged_outcome([v1, v2]), m.outcome([v1, v2]));
        for i in 0..2 {
            prop_assert!((a.alloc[i] - b.alloc[i]).abs() < 1e-12);
            prop_assert!((a.pay[i] - b.pay[i]).abs() < 1e-12 * v1.max(v2));
        }
    }

    #[test]
    fn robust_pricing_guarantees(h in std::f64::consts::E..200.0f64, t in 0.0..=1.0f64) {
        let v = 1.0 + t * (h - 1.0);
        let ratio = PriceDistribution::new(PricingRule::RatioOptimal, h).unwrap();
        prop_assert!(v / ratio.revenue(v) <= 1.0 + h.ln() + 1e-9);
        let regret = PriceDistribution::new(PricingRule::RegretOptimal, h).unwrap();
        prop_assert!(v - regret.revenue(v) <= h / std::f64::consts::E + 1e-9);
    }
}
