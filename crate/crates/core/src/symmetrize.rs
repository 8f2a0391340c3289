//! Log-uniform scale averaging of a two-agent mechanism.
//!
//! `M_L` draws `t` uniformly from `[−L, L]`, runs the base rule on `e^t·v`
//! and divides the payment by `e^t`:
//! `X_L(v) = E_t[x(e^t v)]`, `P_L(v) = E_t[p(e^t v)/e^t]`.
//! As `L` grows the averaged rule approaches scale invariance, with defects
//! bounded by `|ln s|/L` (allocation) and `s·max(v)·|ln s|/L` (payment).

use serde::Serialize;

use crate::analytic;
use crate::error::{Error, Result};
use crate::mechanisms::{CurveRevenue, Mechanism, Outcome};
use crate::quadrature::gauss_legendre_panels;
use crate::revcurve::RevenueCurve;

pub const DEFAULT_PANELS: usize = 1024;
pub const MIN_PANELS: usize = 64;

#[derive(Debug, Clone)]
pub struct ScaledAverage<M> {
    base: M,
    l: f64,
    panels: usize,
}

impl<M: Mechanism> ScaledAverage<M> {
    pub fn new(base: M, l: f64) -> Result<Self> {
        Self::with_panels(base, l, DEFAULT_PANELS)
    }

    pub fn with_panels(base: M, l: f64, panels: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::param("L", l, "must be positive"));
        }
        if panels < MIN_PANELS {
            return Err(Error::param("panels", panels as f64, "at least 64 quadrature panels"));
        }
        Ok(ScaledAverage { base, l, panels })
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    fn log_breakpoints(&self, ks: Vec<f64>) -> Vec<f64> {
        ks.into_iter()
            .filter(|k| *k > 0.0 && k.is_finite())
            .map(f64::ln)
            .filter(|t| t.abs() < self.l)
            .collect()
    }

    /// `(X_L(v), P_L(v))`.
    pub fn averaged_outcome(&self, v: [f64; 2]) -> Outcome {
        let bps = self.log_breakpoints(self.base.scale_breakpoints(v));
        let [x1, x2, p1, p2] = gauss_legendre_panels(
            |t: f64| {
                let k = t.exp();
                let o = self.base.outcome([k * v[0], k * v[1]]);
                [o.alloc[0], o.alloc[1], o.pay[0] / k, o.pay[1] / k]
            },
            -self.l,
            self.l,
            self.panels,
            &bps,
        );
        let w = 0.5 / self.l;
        Outcome {
            alloc: [w * x1, w * x2],
            pay: [w * p1, w * p2],
        }
    }

    /// Sup-norm defects of the averaged rule under `v ↦ s·v`, with the bounds
    /// they must respect.
    pub fn invariance_defect(&self, v: [f64; 2], s: f64) -> Result<Defect> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::param("scale", s, "must be positive"));
        }
        let a = self.averaged_outcome(v);
        let b = self.averaged_outcome([s * v[0], s * v[1]]);
        let alloc = (0..2).map(|i| (b.alloc[i] - a.alloc[i]).abs()).fold(0.0, f64::max);
        let pay = (0..2).map(|i| (b.pay[i] - s * a.pay[i]).abs()).fold(0.0, f64::max);
        let ln_s = s.ln().abs();
        Ok(Defect {
            alloc,
            pay,
            alloc_bound: ln_s / self.l,
            pay_bound: s * v[0].max(v[1]) * ln_s / self.l,
        })
    }
}

impl<M: CurveRevenue> ScaledAverage<M> {
    /// `REV(M_L, F) = E_t[REV(M, F scaled by e^t)/e^t]`.
    pub fn revenue_on_curve(&self, c: &RevenueCurve) -> Result<f64> {
        let bps = self.log_breakpoints(self.base.curve_scale_breakpoints(c));
        let mut err = None;
        let [total] = gauss_legendre_panels(
            |t: f64| {
                let k = t.exp();
                match self.base.revenue_on_curve(&c.scaled(k)) {
                    Ok(r) => [r / k],
                    Err(e) => {
                        err.get_or_insert(e);
                        [0.0]
                    }
                }
            },
            -self.l,
            self.l,
            self.panels,
            &bps,
        );
        match err {
            Some(e) => Err(e),
            None => Ok(total * 0.5 / self.l),
        }
    }

    /// Checks `REV(M_L, F) ≥ OPT(F)/β_base − 1e-6`.
    pub fn revenue_preservation(&self, c: &RevenueCurve, beta_base: f64) -> Result<Preservation> {
        let revenue = self.revenue_on_curve(c)?;
        let opt = analytic::opt_revenue_curve(c);
        let required = opt / beta_base;
        Ok(Preservation {
            revenue,
            opt,
            required,
            holds: revenue >= required - 1e-6,
        })
    }
}

impl<M: Mechanism> Mechanism for ScaledAverage<M> {
    fn outcome(&self, v: [f64; 2]) -> Outcome {
        self.averaged_outcome(v)
    }

    fn label(&self) -> String {
        format!("avg[L={}]({})", self.l, self.base.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Defect {
    pub alloc: f64,
    pub pay: f64,
    pub alloc_bound: f64,
    pub pay_bound: f64,
}

impl Defect {
    /// Both defects within their bounds plus `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.alloc <= self.alloc_bound + tol && self.pay <= self.pay_bound + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preservation {
    pub revenue: f64,
    pub opt: f64,
    pub required: f64,
    pub holds: bool,
}

/// Worst ratio `OPT/REV` of `base` over the curves in `curves`, each scaled
/// by every factor in `scales`.
pub fn scaled_family_ratio<M: CurveRevenue>(base: &M, curves: &[RevenueCurve], scales: &[f64]) -> Result<f64> {
    let mut worst: f64 = 1.0;
    for c in curves {
        for &k in scales {
            let sc = c.scaled(k);
            let rev = base.revenue_on_curve(&sc)?;
            let opt = analytic::opt_revenue_curve(&sc);
            worst = worst.max(if rev > 0.0 { opt / rev } else { f64::INFINITY });
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{MarkupMixture, ReserveSpa};
    use crate::reference::{ALPHA_STAR, BETA, R_STAR};
    use crate::revcurve::TriangleParams;

    const RES: ReserveSpa = ReserveSpa { reserve: 1.0 };

    #[test]
    fn invariant_base_is_unchanged() {
        let m = MarkupMixture::two_atom(ALPHA_STAR, R_STAR).unwrap();
        for &l in &[0.3, 5.0] {
            let avg = ScaledAverage::new(m.clone(), l).unwrap();
            for v in [[1.0, 2.0], [3.0, 7.5], [4.0, 1.0]] {
                let a = avg.averaged_outcome(v);
                let b = m.outcome(v);
                for i in 0..2 {
                    assert!((a.alloc[i] - b.alloc[i]).abs() < 1e-12);
                    assert!((a.pay[i] - b.pay[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reserve_spa_alloc_in_between() {
        let v = [0.5, 0.8];
        let avg = ScaledAverage::new(RES, 5.0).unwrap();
        let a = avg.averaged_outcome(v);
        // L → 0 gives no sale; as L → ∞ the winner gets the item with probability 1/2.
        assert!(a.alloc[1] > 0.0 && a.alloc[1] < 0.5, "{a:?}");
        // exact: P(e^t·0.8 ≥ 1) = (5 − ln 1.25)/10
        assert!((a.alloc[1] - (5.0 - 1.25f64.ln()) / 10.0).abs() < 1e-12);
        for (p, vi) in a.pay.iter().zip(v) {
            assert!(*p >= 0.0 && *p <= vi + 1e-12);
        }
    }

    #[test]
    fn defect_examples() {
        let avg = ScaledAverage::new(RES, 10.0).unwrap();
        let d = avg.invariance_defect([0.5, 0.8], 2.0).unwrap();
        assert!(d.alloc <= 2f64.ln() / 10.0 + 1e-8, "{d:?}");
        assert!(d.alloc > 0.0);
        assert!(d.within(1e-8));
        let d = avg.invariance_defect([0.5, 0.8], 1.0).unwrap();
        assert_eq!((d.alloc, d.pay), (0.0, 0.0));
        let d10 = avg.invariance_defect([0.5, 0.8], 2.0).unwrap();
        let d20 = ScaledAverage::new(RES, 20.0)
            .unwrap()
            .invariance_defect([0.5, 0.8], 2.0)
            .unwrap();
        assert!(d20.alloc <= d10.alloc + 1e-12, "{d10:?} {d20:?}");
    }

    #[test]
    fn preservation_for_mixture() {
        let m = MarkupMixture::two_atom(ALPHA_STAR, R_STAR).unwrap();
        let avg = ScaledAverage::with_panels(m, 2.0, 64).unwrap();
        for q in [0.05, 0.0931057, 0.3, 0.8] {
            let c = TriangleParams::new(q).unwrap().curve().unwrap();
            let p = avg.revenue_preservation(&c, BETA).unwrap();
            assert!(p.holds, "{q}: {p:?}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ScaledAverage::new(RES, 0.0).is_err());
        assert!(ScaledAverage::with_panels(RES, 1.0, 10).is_err());
        assert!(ScaledAverage::new(RES, 1.0)
            .unwrap()
            .invariance_defect([1.0, 2.0], -1.0)
            .is_err());
    }
}
