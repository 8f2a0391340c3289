//! Robust monopoly pricing for one buyer with value in `[1, H]`. Each
//! [`PricingRule`] is optimal for its own worst-case objective.

use serde::{Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PricingRule {
    /// Always post price 1.
    MaxMin,
    /// `G(p) = (1 + ln p)/(1 + ln H)` on `[1, H]`, with an atom at 1.
    RatioOptimal,
    /// `G(p) = 1 + ln(p/H)` on `[H/e, H]`.
    RegretOptimal,
}

impl PricingRule {
    pub const ALL: [PricingRule; 3] = [
        PricingRule::MaxMin,
        PricingRule::RatioOptimal,
        PricingRule::RegretOptimal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PricingRule::MaxMin => "max-min optimal",
            PricingRule::RatioOptimal => "ratio optimal",
            PricingRule::RegretOptimal => "regret optimal",
        }
    }
}

/// A randomized posted price on `[1, H]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceDistribution {
    pub rule: PricingRule,
    pub h: f64,
}

impl PriceDistribution {
    pub fn new(rule: PricingRule, h: f64) -> Result<Self> {
        if !(h > 1.0 && h.is_finite()) {
            return Err(Error::param("H", h, "must exceed 1"));
        }
        if rule == PricingRule::RegretOptimal && h < std::f64::consts::E {
            return Err(Error::param("H", h, "regret-optimal pricing needs H >= e"));
        }
        Ok(PriceDistribution { rule, h })
    }

    /// Lowest price with positive probability.
    pub fn support_low(&self) -> f64 {
        match self.rule {
            PricingRule::RegretOptimal => self.h / std::f64::consts::E,
            _ => 1.0,
        }
    }

    /// Probability mass at the lowest price.
    pub fn atom(&self) -> f64 {
        match self.rule {
            PricingRule::MaxMin => 1.0,
            PricingRule::RatioOptimal => 1.0 / (1.0 + self.h.ln()),
            PricingRule::RegretOptimal => 0.0,
        }
    }

    pub fn cdf(&self, p: f64) -> f64 {
        let h = self.h;
        if p >= h {
            return 1.0;
        }
        match self.rule {
            PricingRule::MaxMin => {
                if p >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            PricingRule::RatioOptimal => {
                if p < 1.0 {
                    0.0
                } else {
                    (1.0 + p.ln()) / (1.0 + h.ln())
                }
            }
            PricingRule::RegretOptimal => {
                if p < self.support_low() {
                    0.0
                } else {
                    1.0 + (p / h).ln()
                }
            }
        }
    }

    /// Density of the continuous part.
    pub fn density(&self, p: f64) -> f64 {
        let h = self.h;
        if p <= self.support_low() || p > h {
            return 0.0;
        }
        match self.rule {
            PricingRule::MaxMin => 0.0,
            PricingRule::RatioOptimal => 1.0 / (p * (1.0 + h.ln())),
            PricingRule::RegretOptimal => 1.0 / p,
        }
    }

    /// Expected revenue against a buyer of value `v`: `∫ p·1{p ≤ v} dG(p)`.
    pub fn revenue(&self, v: f64) -> f64 {
        let h = self.h;
        match self.rule {
            PricingRule::MaxMin => {
                if v >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            PricingRule::RatioOptimal => {
                if v >= 1.0 {
                    v.min(h) / (1.0 + h.ln())
                } else {
                    0.0
                }
            }
            PricingRule::RegretOptimal => {
                let lo = self.support_low();
                if v >= lo {
                    v.min(h) - lo
                } else {
                    0.0
                }
            }
        }
    }

    /// Same as [`revenue`](Self::revenue), integrating the price law numerically.
    pub fn revenue_numeric(&self, v: f64) -> f64 {
        let lo = self.support_low();
        if v < lo {
            return 0.0;
        }
        let upper = v.min(self.h);
        let cont = quadrature::integrate(|p| p * self.density(p), lo, upper, &[], 1e-12).value;
        lo * self.atom() + cont
    }
}

/// `+∞` or a finite number; serializes `+∞` as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn approx_eq(&self, other: &Extended, tol: f64) -> bool {
        match (self, other) {
            (Extended::Infinite, Extended::Infinite) => true,
            (Extended::Finite(a), Extended::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(x) => s.serialize_f64(*x),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x:.6}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParadigmRow {
    pub rule: PricingRule,
    pub min_revenue: f64,
    pub max_approximation: Extended,
    pub max_regret: f64,
}

impl ParadigmRow {
    pub fn approx_eq(&self, other: &ParadigmRow, tol: f64) -> bool {
        self.rule == other.rule
            && (self.min_revenue - other.min_revenue).abs() <= tol
            && self.max_approximation.approx_eq(&other.max_approximation, tol)
            && (self.max_regret - other.max_regret).abs() <= tol
    }
}

/// Default number of buyer values in the worst-case search.
pub const VALUE_GRID: usize = 20_001;

fn value_grid(d: &PriceDistribution, n: usize) -> Vec<f64> {
    let mut vs: Vec<f64> = (0..n).map(|i| 1.0 + (d.h - 1.0) * i as f64 / (n - 1) as f64).collect();
    // the kinks of revenue(v)
    vs.push(d.support_low());
    vs.push(d.h);
    vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vs
}

/// Worst cases over point-mass buyers on a value grid, with revenue from
/// numerical integration of the price law.
pub fn evaluate_row(d: &PriceDistribution, grid: usize) -> ParadigmRow {
    let mut min_revenue = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let mut zero = false;
    let mut max_regret = f64::NEG_INFINITY;
    for v in value_grid(d, grid.max(2)) {
        let rev = d.revenue_numeric(v);
        min_revenue = min_revenue.min(rev);
        if rev <= 1e-15 {
            zero = true;
        } else {
            max_ratio = max_ratio.max(v / rev);
        }
        max_regret = max_regret.max(v - rev);
    }
    ParadigmRow {
        rule: d.rule,
        min_revenue,
        max_approximation: if zero {
            Extended::Infinite
        } else {
            Extended::Finite(max_ratio)
        },
        max_regret,
    }
}

/// The table's closed-form entries.
pub fn closed_form_row(rule: PricingRule, h: f64) -> ParadigmRow {
    let l = 1.0 + h.ln();
    match rule {
        PricingRule::MaxMin => ParadigmRow {
            rule,
            min_revenue: 1.0,
            max_approximation: Extended::Finite(h),
            max_regret: h - 1.0,
        },
        PricingRule::RatioOptimal => ParadigmRow {
            rule,
            min_revenue: 1.0 / l,
            max_approximation: Extended::Finite(l),
            max_regret: h - h / l,
        },
        PricingRule::RegretOptimal => ParadigmRow {
            rule,
            min_revenue: 0.0,
            max_approximation: Extended::Infinite,
            max_regret: h / std::f64::consts::E,
        },
    }
}

/// All three rows, computed on a grid.
pub fn paradigm_table(h: f64) -> Result<[ParadigmRow; 3]> {
    if !(h >= std::f64::consts::E) {
        return Err(Error::param("H", h, "the table needs H >= e"));
    }
    let mut rows = [closed_form_row(PricingRule::MaxMin, h); 3];
    for (slot, rule) in rows.iter_mut().zip(PricingRule::ALL) {
        *slot = evaluate_row(&PriceDistribution::new(rule, h)?, VALUE_GRID);
    }
    Ok(rows)
}

/// Aligned plain-text rendering.
pub fn render_table(h: f64, rows: &[ParadigmRow]) -> String {
    let mut out = format!(
        "H = {h}\n{:<18}{:>16}{:>20}{:>14}\n",
        "mechanism", "min revenue", "max approximation", "max regret"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<18}{:>16.6}{:>20}{:>14.6}\n",
            r.rule.name(),
            r.min_revenue,
            r.max_approximation.to_string(),
            r.max_regret
        ));
    }
    out
}
