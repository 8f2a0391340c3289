//! Monte Carlo auction simulation by inverse-quantile sampling.
//!
//! Samples are drawn in fixed chunks of 2^16, each from its own ChaCha
//! stream keyed by `(seed, chunk index)`. Chunk sums are combined in index
//! order, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::error::{Error, Result};
use crate::mechanisms::{MarkupMixture, Mechanism};
use crate::reference::{ALPHA_STAR, Q_STAR, R_STAR};
use crate::revcurve::{QuadParams, RevenueCurve, TriangleParams};

pub const CHUNK: usize = 1 << 16;

/// Smallest atom quantile accepted by the sampler.
pub const MIN_TOP_QUANTILE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: u64,
    pub seed: u64,
}

fn check_sampleable(c: &RevenueCurve) -> Result<()> {
    if c.vertices()[1][0] < MIN_TOP_QUANTILE {
        return Err(Error::UnboundedSupport(c.top_price()));
    }
    Ok(())
}

/// Value at quantile `u`, i.e. `V(u)`; `u` is clamped into `(0, 1]`.
pub fn sample_value(c: &RevenueCurve, u: f64) -> Result<f64> {
    check_sampleable(c)?;
    Ok(c.price_unchecked(u.clamp(f64::MIN_POSITIVE, 1.0)))
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Sum and sum of squares of `f(rng)` over `n` draws.
fn chunked_moments<F>(n: u64, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK as u64);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let len = (n - k * CHUNK as u64).min(CHUNK as u64);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let x = f(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

/// Expected revenue of `m` when both values are drawn i.i.d. from `c`.
pub fn mc_revenue<M: Mechanism + Sync + ?Sized>(m: &M, c: &RevenueCurve, n: u64, seed: u64) -> Result<McEstimate> {
    if n < 1000 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "at least 1000 samples",
        });
    }
    check_sampleable(c)?;
    let draw = |rng: &mut ChaCha8Rng| {
        // 1 − U lies in (0, 1]
        let u1 = 1.0 - rng.gen::<f64>();
        let u2 = 1.0 - rng.gen::<f64>();
        m.outcome([c.price_unchecked(u1), c.price_unchecked(u2)]).revenue()
    };
    let (s, s2) = chunked_moments(n, seed, draw);
    let nf = n as f64;
    let mean = s / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(McEstimate {
        mean,
        std_err: (var / nf).sqrt(),
        n,
        seed,
    })
}

/// Kolmogorov distance between `n` sampled values and the curve's own
/// quantile law, evaluated at the sample points.
pub fn ks_distance(c: &RevenueCurve, n: usize, seed: u64) -> Result<f64> {
    check_sampleable(c)?;
    let mut rng = chunk_rng(seed, 0);
    let mut xs: Vec<f64> = (0..n).map(|_| c.price_unchecked(1.0 - rng.gen::<f64>())).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let x = xs[i];
        let mut j = i;
        while j < n && xs[j] == x {
            j += 1;
        }
        // empirical P(V < x) = i/n, P(V ≤ x) = j/n
        let below = 1.0 - c.quantile_at_price(x);
        let at_or_below = 1.0 - c.quantile_at_price(x.next_up());
        d = d
            .max((i as f64 / nf - below).abs())
            .max((j as f64 / nf - at_or_below).abs());
        i = j;
    }
    Ok(d)
}

/// One (mechanism, distribution) pair with its deterministic revenue.
#[derive(Debug, Clone)]
pub struct StandingPair {
    pub mechanism: MarkupMixture,
    pub dist: String,
    pub curve: RevenueCurve,
    pub exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub mechanism: String,
    pub dist: String,
    pub exact: f64,
    pub estimate: McEstimate,
    /// `(mean − exact) / std_err`.
    pub z: f64,
}

/// Five mechanisms crossed with four distributions. Triangle entries use
/// the closed forms, the quadrilateral uses quadrature.
pub fn standing_matrix() -> Result<Vec<StandingPair>> {
    let mechanisms = [
        MarkupMixture::spa(),
        MarkupMixture::markup(R_STAR)?,
        MarkupMixture::markup(2.0)?,
        MarkupMixture::two_atom(ALPHA_STAR, R_STAR)?,
        MarkupMixture::two_atom(0.5, 4.0)?,
    ];
    let mut dists: Vec<(String, RevenueCurve, Option<f64>)> = Vec::new();
    for q in [Q_STAR, 0.3, 0.7] {
        dists.push((format!("triangle:{q}"), TriangleParams::new(q)?.curve()?, Some(q)));
    }
    dists.push(("quad:0.2,0.4,2".into(), QuadParams::new(0.2, 0.4, 2.0)?.curve()?, None));
    let mut out = Vec::new();
    for m in &mechanisms {
        for (name, curve, q) in &dists {
            let exact = match q {
                Some(q) => analytic::mixture_revenue_triangle(m, *q)?,
                None => analytic::mixture_revenue(m, curve)?,
            };
            out.push(StandingPair {
                mechanism: m.clone(),
                dist: name.clone(),
                curve: curve.clone(),
                exact,
            });
        }
    }
    Ok(out)
}

/// Estimates every standing pair with `n` draws; pair `i` uses seed `seed + i`.
pub fn run_matrix(n: u64, seed: u64) -> Result<Vec<MatrixRow>> {
    standing_matrix()?
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let estimate = mc_revenue(&p.mechanism, &p.curve, n, seed + i as u64)?;
            Ok(MatrixRow {
                mechanism: p.mechanism.to_string(),
                dist: p.dist,
                exact: p.exact,
                z: (estimate.mean - p.exact) / estimate.std_err,
                estimate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MarkupMixture;
    use crate::revcurve::TriangleParams;

    fn tri(q: f64) -> RevenueCurve {
        TriangleParams::new(q).unwrap().curve().unwrap()
    }

    #[test]
    fn sample_value_examples() {
        let c = tri(0.3);
        assert!((sample_value(&c, 0.3).unwrap() - 1.0 / 0.3).abs() < 1e-15);
        assert_eq!(sample_value(&c, 1.0).unwrap(), 0.0);
        assert_eq!(sample_value(&c, 0.0).unwrap(), 1.0 / 0.3);
        assert!(sample_value(&tri(1e-7), 0.5).is_err());
    }

    #[test]
    fn empirical_law_matches() {
        let d = ks_distance(&tri(0.3), 1_000_000, 7).unwrap();
        assert!(d < 0.002, "{d}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = tri(0.3);
        let m = MarkupMixture::two_atom(0.8, 2.4).unwrap();
        let a = mc_revenue(&m, &c, 300_000, 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_revenue(&m, &c, 300_000, 42).unwrap());
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_err.to_bits(), b.std_err.to_bits());
        let c2 = mc_revenue(&m, &c, 300_000, 43).unwrap();
        assert_ne!(a.mean, c2.mean);
    }

    #[test]
    fn spa_on_triangle_is_one() {
        let e = mc_revenue(&MarkupMixture::spa(), &tri(0.3), 2_000_000, 1).unwrap();
        assert!((e.mean - 1.0).abs() <= 4.0 * e.std_err, "{e:?}");
        assert!(mc_revenue(&MarkupMixture::spa(), &tri(0.3), 10, 1).is_err());
    }

    #[test]
    fn standing_matrix_small_n() {
        let rows = run_matrix(200_000, 11).unwrap();
        assert_eq!(rows.len(), 20);
        for r in &rows {
            assert!(r.z.abs() <= 4.0, "{r:?}");
        }
    }
}
