//! Grid certificates for the equilibrium inequalities.
//!
//! Each region is covered by cells. A cell is closed when a bound derived
//! from values at its corners proves the inequality on the whole cell; a
//! cell that does not close is bisected until it does or its width falls
//! below a floor, in which case it is counted as uncertified.
//!
//! Bounds, with `M(q) = M_r(T_q)` and `Q̂_r(q) = rq/(1−q+rq)`, for `q ∈ [ql, qr]`:
//!
//! * `M(q) ≥ M(ql) − 2(Q̂_r(qr) − Q̂_r(ql))`
//! * `M(q) ≥ M(qr)·(1−qr)/(1−ql)`
//! * `M(q) ≤ 2(Q̂_r(qr) − Q̂_r(ql)) + M(qr)` and `M(q) ≤ M(ql)·(1−ql)/(1−qr)`
//! * `M_r(q) ≤ (r/rl)·M_rl(q)` for `r ≥ rl`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::EquilibriumSolution;
use crate::analytic::{markup_triangle_unchecked, q_hat_inverse_ratio};
use crate::error::{Error, Result};
use crate::reference::Q_STAR_INTERVAL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `M_{r_a}(T_q) > 1` on `[0, q_left]`.
    A,
    /// `M_r(T_q) < 1` on `[q_right, 1] × (1, r_max]`.
    B,
    /// `APX_{α*,r*}(q) ≤ β + allowance` on `[0, 1]`.
    C,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::A, Region::B, Region::C];

    pub fn parse_list(s: &str) -> Result<Vec<Region>> {
        match s {
            "a" => Ok(vec![Region::A]),
            "b" => Ok(vec![Region::B]),
            "c" => Ok(vec![Region::C]),
            "all" => Ok(Region::ALL.to_vec()),
            _ => Err(Error::Parse(format!("unknown region `{s}`; expected a, b, c or all"))),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::A => "a",
            Region::B => "b",
            Region::C => "c",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Base grid spacing in `q` for regions (a) and (c).
    pub epsilon: f64,
    /// Cells narrower than this are not split further.
    pub width_floor: f64,
    pub r_a: f64,
    pub q_left: f64,
    pub q_right: f64,
    pub r_max: f64,
    /// Base grid of region (b): cells in `q` and in `r`.
    pub b_cells: (usize, usize),
    pub alpha: f64,
    pub r_star: f64,
    pub beta: f64,
    /// Additive slack on `β` in region (c).
    pub c_allowance: f64,
}

impl CertifyConfig {
    pub fn new(epsilon: f64, sol: &EquilibriumSolution) -> Self {
        CertifyConfig {
            epsilon,
            width_floor: 1e-13,
            r_a: 2.446946,
            q_left: Q_STAR_INTERVAL.0,
            q_right: Q_STAR_INTERVAL.1,
            r_max: 11.0,
            b_cells: (1024, 1024),
            alpha: sol.alpha_star,
            r_star: sol.r_star,
            beta: sol.beta,
            c_allowance: 2e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub region: Region,
    pub claim: String,
    pub bound: String,
    pub base_cells: u64,
    pub evaluations: u64,
    /// Smallest grid value in (a); largest in (b) and (c).
    pub grid_extreme: f64,
    /// Distance from the grid extreme to the threshold; positive is good.
    pub margin: f64,
    /// Largest gap between a closed cell's bound and its corner values.
    pub max_slack: f64,
    pub refined_cells: u64,
    pub uncertified_cells: u64,
    pub min_cell_width: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub epsilon: f64,
    pub regions: Vec<RegionVerdict>,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy)]
struct Acc {
    extreme: f64,
    max_slack: f64,
    evaluations: u64,
    refined: u64,
    uncertified: u64,
    min_width: f64,
}

impl Acc {
    fn new(extreme: f64) -> Self {
        Acc {
            extreme,
            max_slack: 0.0,
            evaluations: 0,
            refined: 0,
            uncertified: 0,
            min_width: f64::INFINITY,
        }
    }

    fn merge(self, o: Acc, take_min: bool) -> Acc {
        Acc {
            extreme: if take_min {
                self.extreme.min(o.extreme)
            } else {
                self.extreme.max(o.extreme)
            },
            max_slack: self.max_slack.max(o.max_slack),
            evaluations: self.evaluations + o.evaluations,
            refined: self.refined + o.refined,
            uncertified: self.uncertified + o.uncertified,
            min_width: self.min_width.min(o.min_width),
        }
    }
}

// M_r(T_q), with the right limit 1 − q at r = 1.
fn m_right(r: f64, q: f64) -> f64 {
    if r == 1.0 {
        1.0 - q
    } else {
        markup_triangle_unchecked(r, q)
    }
}

fn lower_bound_on_cell(r: f64, ql: f64, qr: f64, ml: f64, mr: f64) -> f64 {
    let drift = ml - 2.0 * (q_hat_inverse_ratio(qr, r) - q_hat_inverse_ratio(ql, r));
    let shrink = mr * (1.0 - qr) / (1.0 - ql);
    drift.max(shrink)
}

fn upper_bound_on_cell(r: f64, ql: f64, qr: f64, ml: f64, mr: f64) -> f64 {
    let drift = 2.0 * (q_hat_inverse_ratio(qr, r) - q_hat_inverse_ratio(ql, r)) + mr;
    let grow = if qr < 1.0 {
        ml * (1.0 - ql) / (1.0 - qr)
    } else {
        f64::INFINITY
    };
    drift.min(grow)
}

/// 1D branch and bound. `node` maps `q` to the tracked grid value and the
/// revenue `M(q)`; `cell` returns the closing verdict and slack of a cell.
#[allow(clippy::too_many_arguments)]
fn refine_1d<N, C>(
    ql: f64,
    qr: f64,
    vl: (f64, f64),
    vr: (f64, f64),
    floor: f64,
    take_min: bool,
    node: &N,
    cell: &C,
    acc: &mut Acc,
) where
    N: Fn(f64) -> (f64, f64),
    C: Fn(f64, f64, f64, f64) -> (bool, f64),
{
    let (closes, slack) = cell(ql, qr, vl.1, vr.1);
    if closes {
        acc.max_slack = acc.max_slack.max(slack);
        acc.min_width = acc.min_width.min(qr - ql);
        return;
    }
    if qr - ql < floor {
        acc.uncertified += 1;
        acc.min_width = acc.min_width.min(qr - ql);
        return;
    }
    acc.refined += 1;
    let qm = 0.5 * (ql + qr);
    let vm = node(qm);
    acc.evaluations += 1;
    acc.extreme = if take_min {
        acc.extreme.min(vm.0)
    } else {
        acc.extreme.max(vm.0)
    };
    refine_1d(ql, qm, vl, vm, floor, take_min, node, cell, acc);
    refine_1d(qm, qr, vm, vr, floor, take_min, node, cell, acc);
}

fn run_1d<N, C>(lo: f64, hi: f64, eps: f64, floor: f64, take_min: bool, node: N, cell: C) -> (u64, Acc)
where
    N: Fn(f64) -> (f64, f64) + Sync,
    C: Fn(f64, f64, f64, f64) -> (bool, f64) + Sync,
{
    let n = ((hi - lo) / eps).ceil().max(1.0) as u64;
    let at = |i: u64| if i == n { hi } else { (lo + i as f64 * eps).min(hi) };
    let start = Acc::new(if take_min { f64::INFINITY } else { f64::NEG_INFINITY });
    // Chunks of consecutive cells so each corner is evaluated once per chunk.
    const BLOCK: u64 = 4096;
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<Acc> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = start;
            let first = b * BLOCK;
            let last = ((b + 1) * BLOCK).min(n);
            let mut ql = at(first);
            let mut vl = node(ql);
            acc.evaluations += 1;
            acc.extreme = if take_min {
                acc.extreme.min(vl.0)
            } else {
                acc.extreme.max(vl.0)
            };
            for i in first..last {
                let qr = at(i + 1);
                let vr = node(qr);
                acc.evaluations += 1;
                acc.extreme = if take_min {
                    acc.extreme.min(vr.0)
                } else {
                    acc.extreme.max(vr.0)
                };
                refine_1d(ql, qr, vl, vr, floor, take_min, &node, &cell, &mut acc);
                ql = qr;
                vl = vr;
            }
            acc
        })
        .collect();
    (n, parts.into_iter().fold(start, |a, p| a.merge(p, take_min)))
}

fn region_a(cfg: &CertifyConfig) -> RegionVerdict {
    let r = cfg.r_a;
    let (n, acc) = run_1d(
        0.0,
        cfg.q_left,
        cfg.epsilon,
        cfg.width_floor,
        true,
        |q| {
            let m = markup_triangle_unchecked(r, q);
            (m, m)
        },
        |ql, qr, ml, mr| {
            let lb = lower_bound_on_cell(r, ql, qr, ml, mr);
            (lb > 1.0, ml.min(mr) - lb)
        },
    );
    RegionVerdict {
        region: Region::A,
        claim: format!("M_{r}(T_q) > 1 for q in [0, {}]", cfg.q_left),
        bound: "M(q) >= max(M(ql) - 2(Qhat(qr) - Qhat(ql)), M(qr)(1-qr)/(1-ql))".into(),
        base_cells: n,
        evaluations: acc.evaluations,
        grid_extreme: acc.extreme,
        margin: acc.extreme - 1.0,
        max_slack: acc.max_slack,
        refined_cells: acc.refined,
        uncertified_cells: acc.uncertified,
        min_cell_width: acc.min_width,
        certified: acc.uncertified == 0 && acc.extreme > 1.0,
    }
}

fn region_c(cfg: &CertifyConfig) -> RegionVerdict {
    let (alpha, r, target) = (cfg.alpha, cfg.r_star, cfg.beta + cfg.c_allowance);
    let apx = |q: f64, m: f64| (2.0 - q) / (alpha + (1.0 - alpha) * m);
    let (n, mut acc) = run_1d(
        0.0,
        0.5,
        cfg.epsilon,
        cfg.width_floor,
        false,
        |q| {
            let m = markup_triangle_unchecked(r, q);
            (apx(q, m), m)
        },
        |ql, qr, ml, mr| {
            let lb = lower_bound_on_cell(r, ql, qr, ml, mr).max(0.0);
            let ub = apx(ql, lb);
            (ub <= target, ub - apx(ql, ml).max(apx(qr, mr)))
        },
    );
    // On [1/2, 1] the mixture earns at least α while OPT ≤ 3/2.
    let upper_half = 1.5 / alpha;
    let closes_upper = upper_half <= 1.875 && upper_half < target;
    acc.extreme = acc.extreme.max(apx(1.0, 0.0));
    RegionVerdict {
        region: Region::C,
        claim: format!(
            "APX of M_(alpha={alpha}, r={r}) <= beta + {} for q in [0, 1]",
            cfg.c_allowance
        ),
        bound: format!("[0, 1/2]: APX <= (2-ql)/(alpha + (1-alpha) lowerM); [1/2, 1]: APX <= 1.5/alpha = {upper_half}"),
        base_cells: n,
        evaluations: acc.evaluations,
        grid_extreme: acc.extreme,
        margin: target - acc.extreme,
        max_slack: acc.max_slack,
        refined_cells: acc.refined,
        uncertified_cells: acc.uncertified + u64::from(!closes_upper),
        min_cell_width: acc.min_width,
        certified: acc.uncertified == 0 && closes_upper && acc.extreme <= target,
    }
}

#[allow(clippy::too_many_arguments)]
fn refine_2d(ql: f64, qr: f64, rl: f64, ru: f64, ml: f64, mr: f64, floor: f64, acc: &mut Acc) {
    let base = upper_bound_on_cell(rl, ql, qr, ml, mr);
    let ub = ru / rl * base;
    if ub < 1.0 {
        acc.max_slack = acc.max_slack.max(ub - ml.max(mr));
        acc.min_width = acc.min_width.min(qr - ql);
        return;
    }
    let r_slack = (ru / rl - 1.0) * base;
    let q_slack = base - ml.max(mr);
    let split_r = r_slack >= q_slack;
    if (split_r && ru - rl < floor) || (!split_r && qr - ql < floor) {
        acc.uncertified += 1;
        acc.min_width = acc.min_width.min(qr - ql);
        return;
    }
    acc.refined += 1;
    if split_r {
        let rm = 0.5 * (rl + ru);
        let (a, b) = (m_right(rm, ql), m_right(rm, qr));
        acc.evaluations += 2;
        acc.extreme = acc.extreme.max(a).max(b);
        refine_2d(ql, qr, rl, rm, ml, mr, floor, acc);
        refine_2d(ql, qr, rm, ru, a, b, floor, acc);
    } else {
        let qm = 0.5 * (ql + qr);
        let mm = m_right(rl, qm);
        acc.evaluations += 1;
        acc.extreme = acc.extreme.max(mm);
        refine_2d(ql, qm, rl, ru, ml, mm, floor, acc);
        refine_2d(qm, qr, rl, ru, mm, mr, floor, acc);
    }
}

fn region_b(cfg: &CertifyConfig) -> RegionVerdict {
    let (nq, nr) = cfg.b_cells;
    let q_at = |i: usize| {
        if i == nq {
            1.0
        } else {
            cfg.q_right + (1.0 - cfg.q_right) * i as f64 / nq as f64
        }
    };
    let r_at = |j: usize| {
        if j == nr {
            cfg.r_max
        } else {
            1.0 + (cfg.r_max - 1.0) * j as f64 / nr as f64
        }
    };
    let start = Acc::new(f64::NEG_INFINITY);
    let parts: Vec<Acc> = (0..nr)
        .into_par_iter()
        .map(|j| {
            let mut acc = start;
            let (rl, ru) = (r_at(j), r_at(j + 1));
            let row: Vec<f64> = (0..=nq).map(|i| m_right(rl, q_at(i))).collect();
            acc.evaluations += row.len() as u64;
            if rl > 1.0 {
                acc.extreme = row.iter().copied().fold(acc.extreme, f64::max);
            }
            for i in 0..nq {
                refine_2d(
                    q_at(i),
                    q_at(i + 1),
                    rl,
                    ru,
                    row[i],
                    row[i + 1],
                    cfg.width_floor,
                    &mut acc,
                );
            }
            if j + 1 == nr {
                let top: Vec<f64> = (0..=nq).map(|i| m_right(ru, q_at(i))).collect();
                acc.evaluations += top.len() as u64;
                acc.extreme = top.iter().copied().fold(acc.extreme, f64::max);
            }
            acc
        })
        .collect();
    let acc = parts.into_iter().fold(start, |a, p| a.merge(p, false));
    RegionVerdict {
        region: Region::B,
        claim: format!("M_r(T_q) < 1 for q in [{}, 1], r in (1, {}]", cfg.q_right, cfg.r_max),
        bound: "M_r(q) <= (ru/rl) min(2(Qhat_rl(qr) - Qhat_rl(ql)) + M_rl(qr), M_rl(ql)(1-ql)/(1-qr))".into(),
        base_cells: (nq * nr) as u64,
        evaluations: acc.evaluations,
        grid_extreme: acc.extreme,
        margin: 1.0 - acc.extreme,
        max_slack: acc.max_slack,
        refined_cells: acc.refined,
        uncertified_cells: acc.uncertified,
        min_cell_width: acc.min_width,
        certified: acc.uncertified == 0 && acc.extreme < 1.0,
    }
}

/// Runs the requested regions. A region that does not close is reported,
/// not raised as an error.
pub fn certify(regions: &[Region], cfg: &CertifyConfig) -> Result<CertificateReport> {
    if !(1e-9..=1e-4).contains(&cfg.epsilon) {
        return Err(Error::param("epsilon", cfg.epsilon, "must lie in [1e-9, 1e-4]"));
    }
    let verdicts: Vec<RegionVerdict> = regions
        .iter()
        .map(|r| match r {
            Region::A => region_a(cfg),
            Region::B => region_b(cfg),
            Region::C => region_c(cfg),
        })
        .collect();
    let certified = verdicts.iter().all(|v| v.certified);
    Ok(CertificateReport {
        epsilon: cfg.epsilon,
        regions: verdicts,
        certified,
    })
}
