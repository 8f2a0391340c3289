//! Distributions represented by their price-posting revenue curves.
//!
//! A value distribution is identified with its quantile function `Q(v)`
//! (probability that a value weakly exceeds `v`) and its revenue curve
//! `R(q) = q·V(q)`. Every curve here is piecewise linear and concave, i.e. a
//! regular distribution. Point masses never appear as densities; an atom at
//! the top of the support is the initial linear piece through the origin.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Probability that a value weakly exceeds a threshold, in `[0, 1]`.
pub type Quantile = f64;
/// A non-negative monetary value.
pub type Value = f64;

/// Relative slack allowed on slope monotonicity when validating concavity.
pub const CONCAVITY_TOL: f64 = 1e-9;

const PEAK_TOL: f64 = 1e-12;

/// Area under a polyline by the trapezoid rule (exact for piecewise-linear data).
pub fn area_under(vertices: &[[f64; 2]]) -> f64 {
    vertices
        .windows(2)
        .map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][1] + w[1][1]))
        .sum()
}

fn interpolate(vertices: &[[f64; 2]], q: f64) -> f64 {
    let idx = vertices.partition_point(|p| p[0] < q);
    if idx == 0 {
        return vertices[0][1];
    }
    if idx >= vertices.len() {
        return vertices[vertices.len() - 1][1];
    }
    let [q0, r0] = vertices[idx - 1];
    let [q1, r1] = vertices[idx];
    if q == q1 {
        return r1;
    }
    r0 + (r1 - r0) * (q - q0) / (q1 - q0)
}

/// Concave piecewise-linear revenue curve on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct RevenueCurve {
    vertices: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<RawCurve> for RevenueCurve {
    type Error = Error;
    fn try_from(raw: RawCurve) -> Result<Self> {
        RevenueCurve::new(raw.vertices)
    }
}

impl From<RevenueCurve> for RawCurve {
    fn from(c: RevenueCurve) -> Self {
        RawCurve { vertices: c.vertices }
    }
}

impl RevenueCurve {
    /// Validates and builds a curve from `(q, R)` vertices.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("need at least two vertices".into()));
        }
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidCurve("non-finite vertex".into()));
        }
        if vertices[0] != [0.0, 0.0] {
            return Err(Error::InvalidCurve("first vertex must be (0, 0)".into()));
        }
        if vertices[vertices.len() - 1][0] != 1.0 {
            return Err(Error::InvalidCurve("last vertex must have q = 1".into()));
        }
        if vertices.iter().any(|p| p[1] < 0.0) {
            return Err(Error::InvalidCurve("negative revenue".into()));
        }
        if vertices.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::InvalidCurve("quantiles must be strictly increasing".into()));
        }
        let slopes: Vec<f64> = vertices
            .windows(2)
            .map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]))
            .collect();
        for (k, s) in slopes.windows(2).enumerate() {
            if s[1] > s[0] + CONCAVITY_TOL * s[0].abs().max(1.0) {
                return Err(Error::InvalidCurve(format!(
                    "not concave at vertex {}: slope {} then {}",
                    k + 1,
                    s[0],
                    s[1]
                )));
            }
        }
        Ok(RevenueCurve { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// `R(q)` by linear interpolation.
    pub fn value(&self, q: Quantile) -> f64 {
        interpolate(&self.vertices, q.clamp(0.0, 1.0))
    }

    /// Price `V(q) = R(q)/q` at quantile `q > 0`.
    pub fn price(&self, q: Quantile) -> Result<Value> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::param("q", q, "price requires 0 < q <= 1"));
        }
        Ok(self.price_unchecked(q))
    }

    /// `V(q)` without validation; `q` must lie in `(0, 1]`.
    #[inline]
    pub(crate) fn price_unchecked(&self, q: Quantile) -> Value {
        let [q1, r1] = self.vertices[1];
        if q <= q1 {
            // Constant on the atom: keep it bit-exact so ties are detectable.
            r1 / q1
        } else {
            self.value(q) / q
        }
    }

    /// Highest point of the support, `V(0+)`.
    pub fn top_price(&self) -> Value {
        let [q1, r1] = self.vertices[1];
        r1 / q1
    }

    /// Lowest point of the support, `V(1) = R(1)`.
    pub fn bottom_price(&self) -> Value {
        self.vertices[self.vertices.len() - 1][1]
    }

    /// Probability mass sitting exactly at the top of the support.
    pub fn top_atom(&self) -> Quantile {
        let top = self.top_price();
        let mut mass = self.vertices[1][0];
        for p in &self.vertices[2..] {
            if (p[1] / p[0] - top).abs() <= 1e-15 * top.max(1.0) {
                mass = p[0];
            } else {
                break;
            }
        }
        mass
    }

    /// Quantile function `Q(x)`: probability that a value weakly exceeds `x`.
    pub fn quantile_at_price(&self, x: Value) -> Quantile {
        if x <= 0.0 {
            return 1.0;
        }
        let top = self.top_price();
        if x > top {
            return 0.0;
        }
        if x <= self.bottom_price() {
            return 1.0;
        }
        let v = &self.vertices;
        let k = (1..v.len()).find(|&k| v[k][1] / v[k][0] < x).unwrap_or(v.len() - 1);
        if k <= 1 {
            return v[1][0];
        }
        let [q0, r0] = v[k - 1];
        let [q1, r1] = v[k];
        let slope = (r1 - r0) / (q1 - q0);
        let intercept = r0 - slope * q0;
        let q = intercept / (x - slope);
        q.clamp(q0, q1)
    }

    /// Revenue from posting price `x` to one agent, `P(x) = x·Q(x)`.
    pub fn price_revenue(&self, x: Value) -> f64 {
        x * self.quantile_at_price(x)
    }

    /// Largest revenue value and the smallest quantile attaining it.
    pub fn peak(&self) -> (Quantile, f64) {
        let max = self.vertices.iter().map(|p| p[1]).fold(f64::MIN, f64::max);
        let p = self
            .vertices
            .iter()
            .find(|p| p[1] >= max - PEAK_TOL * max.abs())
            .expect("curve has vertices");
        (p[0], p[1])
    }

    /// Smallest quantile maximizing `R`.
    pub fn monopoly_quantile(&self) -> Quantile {
        self.peak().0
    }

    pub fn area(&self) -> f64 {
        area_under(&self.vertices)
    }

    pub fn is_normalized(&self) -> bool {
        (self.peak().1 - 1.0).abs() <= 1e-9
    }

    /// Rescales revenue so that `max R = 1`; quantiles are unchanged.
    pub fn normalize(&self) -> Result<RevenueCurve> {
        let (_, max) = self.peak();
        if max <= 0.0 {
            return Err(Error::InvalidCurve("cannot normalize a zero curve".into()));
        }
        Ok(self.scaled(1.0 / max))
    }

    /// Curve of the distribution of `k·v`: revenue scales by `k`.
    pub fn scaled(&self, k: f64) -> RevenueCurve {
        RevenueCurve {
            vertices: self.vertices.iter().map(|p| [p[0], p[1] * k]).collect(),
        }
    }

    /// Truncation at the monopoly price: every value above it is replaced
    /// by the monopoly price.
    pub fn truncate(&self) -> RevenueCurve {
        let (qbar, rmax) = self.peak();
        let mut vertices = vec![[0.0, 0.0], [qbar, rmax]];
        vertices.extend(self.vertices.iter().filter(|p| p[0] > qbar));
        RevenueCurve { vertices }
    }

    /// Replaces the curve on `[a, b]` by its chord.
    pub fn iron(&self, a: Quantile, b: Quantile) -> Result<RevenueCurve> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::param("a", a, "iron requires 0 <= a < b <= 1"));
        }
        let (ra, rb) = (self.value(a), self.value(b));
        let mut vertices: Vec<[f64; 2]> = self.vertices.iter().copied().filter(|p| p[0] < a).collect();
        vertices.push([a, ra]);
        vertices.push([b, rb]);
        vertices.extend(self.vertices.iter().filter(|p| p[0] > b));
        RevenueCurve::new(vertices)
    }

    /// Smallest non-decreasing concave upper bound: the curve up to its
    /// peak, flat at the peak height afterwards. Twice its area is the
    /// optimal two-agent revenue.
    pub fn monotone_hull(&self) -> RevenueCurve {
        let (qbar, rmax) = self.peak();
        let mut vertices: Vec<[f64; 2]> = self.vertices.iter().copied().filter(|p| p[0] <= qbar).collect();
        if qbar < 1.0 {
            vertices.push([1.0, rmax]);
        }
        RevenueCurve { vertices }
    }

    /// Triangle distribution with the same monopoly quantile.
    pub fn triangulate(&self) -> Result<TriangleParams> {
        let (qbar, rmax) = self.peak();
        if (rmax - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(rmax));
        }
        TriangleParams::new(qbar)
    }

    /// Drops interior vertices lying on the segment between their neighbours.
    pub fn simplify(&self) -> RevenueCurve {
        let mut out: Vec<[f64; 2]> = vec![self.vertices[0]];
        for k in 1..self.vertices.len() - 1 {
            let [qa, ra] = *out.last().unwrap();
            let [qb, rb] = self.vertices[k];
            let [qc, rc] = self.vertices[k + 1];
            let on_chord = ra + (rc - ra) * (qb - qa) / (qc - qa);
            if (rb - on_chord).abs() > 1e-12 * rb.abs().max(1.0) {
                out.push([qb, rb]);
            }
        }
        out.push(*self.vertices.last().unwrap());
        RevenueCurve { vertices: out }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serializes")
    }

    pub fn from_json(s: &str) -> Result<RevenueCurve> {
        Ok(serde_json::from_str(s)?)
    }

    /// CSV with header `q,R`, 17 significant digits per number.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,R\n");
        for [q, r] in &self.vertices {
            writeln!(out, "{:.16e},{:.16e}", q, r).unwrap();
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<RevenueCurve> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "q,R" => {}
            other => return Err(Error::Parse(format!("expected header `q,R`, got {:?}", other))),
        }
        let mut vertices = Vec::new();
        for line in lines {
            let mut it = line.split(',');
            let parse = |t: Option<&str>| -> Result<f64> {
                t.ok_or_else(|| Error::Parse(format!("short row `{line}`")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("`{line}`: {e}")))
            };
            vertices.push([parse(it.next())?, parse(it.next())?]);
        }
        RevenueCurve::new(vertices)
    }
}

/// Normalized triangle distribution `T_q̄`: revenue curve `(0,0)–(q̄,1)–(1,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleParams {
    q_bar: Quantile,
}

impl TriangleParams {
    pub fn new(q_bar: Quantile) -> Result<Self> {
        if !(0.0..=1.0).contains(&q_bar) {
            return Err(Error::param("q_bar", q_bar, "must lie in [0, 1]"));
        }
        Ok(TriangleParams { q_bar })
    }

    /// The point mass at value 1.
    pub fn point_mass() -> Self {
        TriangleParams { q_bar: 1.0 }
    }

    pub fn q_bar(&self) -> Quantile {
        self.q_bar
    }

    /// `Q(v) = 1/(1 + v(1-q̄))` up to the support top `1/q̄`, 0 above.
    pub fn quantile(&self, v: Value) -> Quantile {
        let qb = self.q_bar;
        if qb == 1.0 {
            return if v <= 1.0 { 1.0 } else { 0.0 };
        }
        if qb > 0.0 && v > 1.0 / qb {
            return 0.0;
        }
        1.0 / (1.0 + v * (1.0 - qb))
    }

    /// Inverse of [`quantile`](Self::quantile); quantiles below `q̄` map to the atom `1/q̄`.
    pub fn value(&self, q: Quantile) -> Result<Value> {
        let qb = self.q_bar;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::param("q", q, "must lie in [0, 1]"));
        }
        if qb == 1.0 {
            return Ok(1.0);
        }
        if q < qb {
            return Ok(1.0 / qb);
        }
        if q == 0.0 {
            return Err(Error::param("q", q, "unbounded value at q = 0 when q_bar = 0"));
        }
        Ok((1.0 - q) / (q * (1.0 - qb)))
    }

    pub fn curve(&self) -> Result<RevenueCurve> {
        let qb = self.q_bar;
        if qb == 0.0 {
            return Err(Error::param("q_bar", qb, "T_0 has unbounded support and no curve"));
        }
        if qb == 1.0 {
            return RevenueCurve::new(vec![[0.0, 0.0], [1.0, 1.0]]);
        }
        RevenueCurve::new(vec![[0.0, 0.0], [qb, 1.0], [1.0, 0.0]])
    }
}

/// Normalized quadrilateral distribution `Q_{q̄, q̄', r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadParams {
    q_bar: Quantile,
    q_bar_prime: Quantile,
    r: f64,
}

const WINDOW_TOL: f64 = 1e-12;

impl QuadParams {
    pub fn new(q_bar: Quantile, q_bar_prime: Quantile, r: f64) -> Result<Self> {
        if !(q_bar > 0.0 && q_bar < 1.0) {
            return Err(Error::param("q_bar", q_bar, "must lie in (0, 1)"));
        }
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::param("r", r, "must exceed 1"));
        }
        let lo = Self::min_q_bar_prime(q_bar, r);
        let hi = Self::max_q_bar_prime(q_bar, r);
        if q_bar_prime < lo - WINDOW_TOL || q_bar_prime > hi + WINDOW_TOL {
            return Err(Error::param(
                "q_bar_prime",
                q_bar_prime,
                "outside the window [q̄r/(q̄r+1-q̄), min(rq̄, 1)]",
            ));
        }
        Ok(QuadParams {
            q_bar,
            q_bar_prime: q_bar_prime.clamp(lo, hi),
            r,
        })
    }

    /// Smallest admissible `q̄'`, where the quadrilateral degenerates to `T_q̄`.
    pub fn min_q_bar_prime(q_bar: Quantile, r: f64) -> Quantile {
        q_bar * r / (q_bar * r + (1.0 - q_bar))
    }

    pub fn max_q_bar_prime(q_bar: Quantile, r: f64) -> Quantile {
        (r * q_bar).min(1.0)
    }

    pub fn q_bar(&self) -> Quantile {
        self.q_bar
    }
    pub fn q_bar_prime(&self) -> Quantile {
        self.q_bar_prime
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn quantile(&self, v: Value) -> Quantile {
        let (qb, qp, r) = (self.q_bar, self.q_bar_prime, self.r);
        if v < 1.0 / (r * qb) {
            qp / (qp + v * r * qb * (1.0 - qp))
        } else if v <= 1.0 / qb {
            qp * qb * (r - 1.0) / (v * r * qb * (qp - qb) + (r * qb - qp))
        } else {
            0.0
        }
    }

    pub fn curve(&self) -> Result<RevenueCurve> {
        let (qb, qp, r) = (self.q_bar, self.q_bar_prime, self.r);
        let mut vertices = vec![[0.0, 0.0], [qb, 1.0], [qp, qp / (r * qb)]];
        if qp < 1.0 {
            vertices.push([1.0, 0.0]);
        }
        RevenueCurve::new(vertices)
    }
}

/// Quantile of the price `r·V(q)` under `T_q̄`, or 0 if that price is above
/// the support.
pub fn q_hat(q: Quantile, r: f64, p: &TriangleParams) -> Quantile {
    let qb = p.q_bar();
    if q <= 0.0 {
        return 0.0;
    }
    let v = match p.value(q) {
        Ok(v) => v,
        Err(_) => return 0.0,
    };
    if qb > 0.0 && r * v > 1.0 / qb {
        return 0.0;
    }
    q / (r - q * r + q)
}
