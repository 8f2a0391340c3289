//! Ex-post rules for two agents: markup mechanisms and their mixtures, plus
//! two non-invariant rules used as controls.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::revcurve::RevenueCurve;

/// Allocation probabilities and payments for one value profile.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub alloc: [f64; 2],
    pub pay: [f64; 2],
}

impl Outcome {
    pub fn revenue(&self) -> f64 {
        self.pay[0] + self.pay[1]
    }

    pub fn swapped(&self) -> Outcome {
        Outcome {
            alloc: [self.alloc[1], self.alloc[0]],
            pay: [self.pay[1], self.pay[0]],
        }
    }

    fn add_scaled(&mut self, other: &Outcome, w: f64) {
        for i in 0..2 {
            self.alloc[i] += w * other.alloc[i];
            self.pay[i] += w * other.pay[i];
        }
    }

    fn sale(winner: usize, price: f64, weight: f64) -> Outcome {
        let mut o = Outcome::default();
        o.alloc[winner] = weight;
        o.pay[winner] = weight * price;
        o
    }
}

/// Any deterministic or randomized two-agent rule, given by its expected outcome.
pub trait Mechanism {
    fn outcome(&self, v: [f64; 2]) -> Outcome;

    /// Scales `k > 0` at which `k ↦ outcome(k·v)` may jump. Empty for
    /// scale-invariant rules.
    fn scale_breakpoints(&self, _v: [f64; 2]) -> Vec<f64> {
        Vec::new()
    }

    fn label(&self) -> String;
}

/// Mechanisms whose expected revenue on a revenue curve has a deterministic
/// evaluation.
pub trait CurveRevenue: Mechanism {
    fn revenue_on_curve(&self, c: &RevenueCurve) -> Result<f64>;

    /// Scales `k` at which `k ↦ revenue_on_curve(c.scaled(k))` may have a kink.
    fn curve_scale_breakpoints(&self, _c: &RevenueCurve) -> Vec<f64> {
        Vec::new()
    }
}

/// Offer the higher agent `r` times the lower value. `tie_coin < 1/2`
/// resolves a tie in favour of agent 1.
pub fn run_markup(r: f64, v1: f64, v2: f64, tie_coin: f64) -> Outcome {
    let winner = if v1 > v2 || (v1 == v2 && tie_coin < 0.5) { 0 } else { 1 };
    let (high, low) = if winner == 0 { (v1, v2) } else { (v2, v1) };
    let price = r * low;
    if high >= price {
        Outcome::sale(winner, price, 1.0)
    } else {
        Outcome::default()
    }
}

/// One atom of a markup mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkupAtom {
    pub w: f64,
    pub r: f64,
}

/// Finite distribution over markup ratios `r ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture", into = "RawMixture")]
pub struct MarkupMixture {
    atoms: Vec<MarkupAtom>,
}

#[derive(Serialize, Deserialize)]
struct RawMixture {
    atoms: Vec<MarkupAtom>,
}

impl TryFrom<RawMixture> for MarkupMixture {
    type Error = Error;
    fn try_from(raw: RawMixture) -> Result<Self> {
        MarkupMixture::new(raw.atoms)
    }
}

impl From<MarkupMixture> for RawMixture {
    fn from(m: MarkupMixture) -> Self {
        RawMixture { atoms: m.atoms }
    }
}

impl MarkupMixture {
    pub fn new(atoms: Vec<MarkupAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMixture("no atoms".into()));
        }
        for a in &atoms {
            if !(a.w > 0.0 && a.w <= 1.0) {
                return Err(Error::InvalidMixture(format!("weight {} outside (0, 1]", a.w)));
            }
            if !(a.r >= 1.0 && a.r.is_finite()) {
                return Err(Error::InvalidMixture(format!("ratio {} below 1", a.r)));
            }
        }
        if atoms.windows(2).any(|p| p[1].r <= p[0].r) {
            return Err(Error::InvalidMixture("ratios must be strictly increasing".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(MarkupMixture { atoms })
    }

    /// The second-price auction.
    pub fn spa() -> Self {
        MarkupMixture {
            atoms: vec![MarkupAtom { w: 1.0, r: 1.0 }],
        }
    }

    pub fn markup(r: f64) -> Result<Self> {
        Self::new(vec![MarkupAtom { w: 1.0, r }])
    }

    /// `M_{α,r}`: second price with probability `α`, `r`-markup otherwise.
    pub fn two_atom(alpha: f64, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::param("alpha", alpha, "must lie in [0, 1]"));
        }
        if alpha == 1.0 {
            return Ok(Self::spa());
        }
        if alpha == 0.0 {
            return Self::markup(r);
        }
        if r <= 1.0 {
            return Err(Error::param("r", r, "must exceed 1"));
        }
        Self::new(vec![MarkupAtom { w: alpha, r: 1.0 }, MarkupAtom { w: 1.0 - alpha, r }])
    }

    pub fn atoms(&self) -> &[MarkupAtom] {
        &self.atoms
    }

    /// Parses `w:r[,w:r...]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (w, r) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("mixture atom `{part}` is not `w:r`")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("mixture atom `{part}`: {e}")))
            };
            atoms.push(MarkupAtom { w: num(w)?, r: num(r)? });
        }
        Self::new(atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mixture serializes")
    }
}

impl fmt::Display for MarkupMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|a| format!("{}:{}", a.w, a.r)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Expected outcome of a mixture; a tie gives each agent half the weight of
/// a second-price atom and nothing under a strict markup.
pub fn run_mixture(m: &MarkupMixture, v1: f64, v2: f64) -> Outcome {
    let mut out = Outcome::default();
    for a in &m.atoms {
        if v1 == v2 {
            if a.r == 1.0 {
                let half = Outcome {
                    alloc: [0.5, 0.5],
                    pay: [0.5 * v1, 0.5 * v2],
                };
                out.add_scaled(&half, a.w);
            }
        } else {
            out.add_scaled(&run_markup(a.r, v1, v2, 0.0), a.w);
        }
    }
    out
}

impl Mechanism for MarkupMixture {
    fn outcome(&self, v: [f64; 2]) -> Outcome {
        run_mixture(self, v[0], v[1])
    }

    fn label(&self) -> String {
        format!("mixture[{self}]")
    }
}

impl CurveRevenue for MarkupMixture {
    fn revenue_on_curve(&self, c: &RevenueCurve) -> Result<f64> {
        crate::analytic::mixture_revenue(self, c)
    }
}

/// Second-price auction with an anonymous reserve. Not scale invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReserveSpa {
    pub reserve: f64,
}

impl Mechanism for ReserveSpa {
    fn outcome(&self, v: [f64; 2]) -> Outcome {
        let rho = self.reserve;
        let [v1, v2] = v;
        if v1.max(v2) < rho {
            return Outcome::default();
        }
        if v1 == v2 {
            return Outcome {
                alloc: [0.5, 0.5],
                pay: [0.5 * v1, 0.5 * v2],
            };
        }
        let winner = if v1 > v2 { 0 } else { 1 };
        Outcome::sale(winner, v1.min(v2).max(rho), 1.0)
    }

    fn scale_breakpoints(&self, v: [f64; 2]) -> Vec<f64> {
        v.iter().filter(|x| **x > 0.0).map(|x| self.reserve / x).collect()
    }

    fn label(&self) -> String {
        format!("reserve-spa:{}", self.reserve)
    }
}

impl CurveRevenue for ReserveSpa {
    fn revenue_on_curve(&self, c: &RevenueCurve) -> Result<f64> {
        let rho = self.reserve;
        let top = c.top_price();
        let atom = c.top_atom();
        let q_rho = c.quantile_at_price(rho);
        let fixed = rho * q_rho;
        // Agent 1's expected payment given the opponent sits at quantile q2.
        let g = |q2: f64| {
            if q2 <= 0.0 {
                return 0.0;
            }
            let w = c.price_unchecked(q2);
            if w >= rho {
                let tie = if w == top { 0.5 * atom } else { 0.0 };
                w * (c.quantile_at_price(w) - tie)
            } else {
                fixed
            }
        };
        let mut bps: Vec<f64> = c.vertices().iter().map(|p| p[0]).collect();
        bps.push(q_rho);
        let r = quadrature::integrate(g, 0.0, 1.0, &bps, 1e-11);
        Ok(2.0 * r.value)
    }

    fn curve_scale_breakpoints(&self, c: &RevenueCurve) -> Vec<f64> {
        let mut out = vec![self.reserve / c.top_price()];
        for p in &c.vertices()[1..] {
            if p[1] > 0.0 {
                out.push(self.reserve * p[0] / p[1]);
            }
        }
        out
    }
}

/// First-price auction: the higher bid wins and pays its own bid. Not DSIC.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FirstPrice;

impl Mechanism for FirstPrice {
    fn outcome(&self, v: [f64; 2]) -> Outcome {
        let [v1, v2] = v;
        if v1 == v2 {
            return Outcome {
                alloc: [0.5, 0.5],
                pay: [0.5 * v1, 0.5 * v2],
            };
        }
        let winner = if v1 > v2 { 0 } else { 1 };
        Outcome::sale(winner, v[winner], 1.0)
    }

    fn label(&self) -> String {
        "first-price".into()
    }
}

/// A profitable misreport found on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DsicViolation {
    pub values: [f64; 2],
    pub agent: usize,
    pub report: f64,
    pub gain: f64,
}

const DSIC_TOL: f64 = 1e-9;

/// Tries every profile in `grid²` and every unilateral misreport in `grid`.
pub fn check_dsic<M: Mechanism + ?Sized>(m: &M, grid: &[f64]) -> Vec<DsicViolation> {
    let mut out = Vec::new();
    for &v1 in grid {
        for &v2 in grid {
            let v = [v1, v2];
            let truth = m.outcome(v);
            for agent in 0..2 {
                let u_truth = truth.alloc[agent] * v[agent] - truth.pay[agent];
                for &z in grid {
                    let mut b = v;
                    b[agent] = z;
                    let o = m.outcome(b);
                    let u = o.alloc[agent] * v[agent] - o.pay[agent];
                    if u > u_truth + DSIC_TOL {
                        out.push(DsicViolation {
                            values: v,
                            agent,
                            report: z,
                            gain: u - u_truth,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Measured departure from scale invariance at one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleDefect {
    /// `max_i |x_i(k·v) − x_i(v)|`.
    pub alloc: f64,
    /// `|rev(k·v) − k·rev(v)| / max(k·rev(v), 1e-300)`, or the absolute gap when both are tiny.
    pub revenue_rel: f64,
}

impl ScaleDefect {
    pub fn is_invariant(&self) -> bool {
        self.alloc == 0.0 && self.revenue_rel <= 1e-12
    }
}

pub fn check_scale_invariance<M: Mechanism + ?Sized>(m: &M, v1: f64, v2: f64, k: f64) -> ScaleDefect {
    let a = m.outcome([v1, v2]);
    let b = m.outcome([k * v1, k * v2]);
    let alloc = (a.alloc[0] - b.alloc[0]).abs().max((a.alloc[1] - b.alloc[1]).abs());
    let want = k * a.revenue();
    let gap = (b.revenue() - want).abs();
    let revenue_rel = if want.abs() > 1e-300 { gap / want.abs() } else { gap };
    ScaleDefect { alloc, revenue_rel }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{ALPHA_STAR, R_STAR};
    use proptest::prelude::*;

    fn opt_mix() -> MarkupMixture {
        MarkupMixture::parse("0.80564048:1,0.19435952:2.4469452").unwrap()
    }

    #[test]
    fn run_markup_examples() {
        let o = run_markup(1.0, 3.0, 5.0, 0.3);
        assert_eq!(o.alloc, [0.0, 1.0]);
        assert_eq!(o.pay, [0.0, 3.0]);
        assert_eq!(run_markup(2.0, 3.0, 5.0, 0.3).revenue(), 0.0);
        let o = run_markup(2.0, 3.0, 7.0, 0.3);
        assert_eq!(o.alloc, [0.0, 1.0]);
        assert_eq!(o.pay, [0.0, 6.0]);
    }

    #[test]
    fn ties() {
        assert_eq!(run_markup(1.0, 2.0, 2.0, 0.2).alloc, [1.0, 0.0]);
        assert_eq!(run_markup(1.0, 2.0, 2.0, 0.7).alloc, [0.0, 1.0]);
        assert_eq!(run_markup(1.5, 2.0, 2.0, 0.2).revenue(), 0.0);
        let o = run_mixture(&opt_mix(), 2.0, 2.0);
        assert!((o.alloc[0] - ALPHA_STAR / 2.0).abs() < 1e-15);
        assert!((o.revenue() - 2.0 * ALPHA_STAR).abs() < 1e-15);
    }

    #[test]
    fn mixture_examples() {
        assert_eq!(
            run_mixture(&MarkupMixture::spa(), 3.0, 5.0),
            run_markup(1.0, 3.0, 5.0, 0.0)
        );
        assert!((run_mixture(&opt_mix(), 1.0, 2.0).revenue() - 0.80564048).abs() < 1e-15);
        let want = 0.80564048 + 0.19435952 * 2.4469452;
        assert!((run_mixture(&opt_mix(), 1.0, 3.0).revenue() - want).abs() < 1e-14);
        assert!((want - 1.2812276).abs() < 1e-7);
    }

    #[test]
    fn mixture_validation_and_json() {
        assert!(MarkupMixture::parse("0.5:1,0.4:2").is_err());
        assert!(MarkupMixture::parse("0.5:2,0.5:1").is_err());
        assert!(MarkupMixture::parse("1:0.5").is_err());
        assert!(MarkupMixture::parse("abc").is_err());
        let m = MarkupMixture::two_atom(ALPHA_STAR, R_STAR).unwrap();
        let j = m.to_json();
        assert!(j.starts_with("{\"atoms\":[{\"w\":"));
        let back: MarkupMixture = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MarkupMixture>("{\"atoms\":[{\"w\":0.3,\"r\":1}]}").is_err());
    }

    #[test]
    fn dsic_examples() {
        assert!(check_dsic(&MarkupMixture::spa(), &[0.0, 1.0, 2.0, 3.0]).is_empty());
        let grid: Vec<f64> = (0..50).map(|i| 0.1 * 1.15f64.powi(i)).collect();
        assert!(check_dsic(&opt_mix(), &grid).is_empty());
        assert!(!check_dsic(&FirstPrice, &[0.0, 1.0, 2.0, 3.0]).is_empty());
    }

    #[test]
    fn scale_examples() {
        assert!(check_scale_invariance(&opt_mix(), 1.0, 2.0, 100.0).is_invariant());
        assert!(check_scale_invariance(&opt_mix(), 3.0, 7.0, 1.0 / 3.0).alloc == 0.0);
        let d = check_scale_invariance(&ReserveSpa { reserve: 1.0 }, 0.5, 0.6, 10.0);
        assert!(d.alloc > 0.0);
    }

    #[test]
    fn reserve_spa_revenue_matches_area_when_reserve_is_low() {
        let c = crate::revcurve::TriangleParams::new(0.4).unwrap().curve().unwrap();
        let rev = ReserveSpa { reserve: 0.0 }.revenue_on_curve(&c).unwrap();
        assert!((rev - 2.0 * c.area()).abs() < 1e-9, "{rev}");
        // Reserve at the monopoly price on a truncated curve posts it to both.
        let rev = ReserveSpa { reserve: 2.5 }.revenue_on_curve(&c).unwrap();
        assert!((rev - (2.0 - 0.4)).abs() < 1e-9, "{rev}");
    }

    fn mixture_strategy() -> impl Strategy<Value = MarkupMixture> {
        (0.0f64..=1.0, 1.0001f64..8.0).prop_map(|(a, r)| MarkupMixture::two_atom(a, r).unwrap())
    }

    proptest! {
        #[test]
        fn feasible_ir_symmetric(m in mixture_strategy(), v1 in 0.0f64..100.0, v2 in 0.0f64..100.0) {
            let o = run_mixture(&m, v1, v2);
            prop_assert!(o.alloc[0] + o.alloc[1] <= 1.0 + 1e-12);
            for i in 0..2 {
                let v = [v1, v2][i];
                prop_assert!(o.pay[i] >= 0.0);
                prop_assert!(o.pay[i] <= v * o.alloc[i] + 1e-12);
                if o.alloc[i] == 0.0 { prop_assert_eq!(o.pay[i], 0.0); }
            }
            prop_assert_eq!(run_mixture(&m, v2, v1), o.swapped());
        }

        #[test]
        fn homogeneous(m in mixture_strategy(), v1 in 0.01f64..100.0, v2 in 0.01f64..100.0, k in 0.01f64..100.0) {
            let d = check_scale_invariance(&m, v1, v2, k);
            prop_assert_eq!(d.alloc, 0.0);
            prop_assert!(d.revenue_rel <= 1e-12);
        }

        #[test]
        fn fixed_ratio_is_truthful(r in 1.0f64..6.0, seed in proptest::collection::vec(0.01f64..10.0, 8)) {
            let m = MarkupMixture::markup(r).unwrap();
            prop_assert!(check_dsic(&m, &seed).is_empty());
        }
    }
}
