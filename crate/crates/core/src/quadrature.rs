//! Numerical integration used by the revenue oracles.
//!
//! [`integrate`] is an adaptive Gauss–Kronrod (7/15) scheme that never
//! integrates across a caller-supplied breakpoint, so kinks and jumps that
//! are known analytically cost nothing. [`gauss_legendre_panels`] is the
//! fixed composite rule used for the log-scale averages in `symmetrize`.

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32, acc: &mut Integral) {
    let (value, err) = whole;
    if err <= tol || depth >= MAX_DEPTH || (b - a) <= f64::EPSILON * a.abs().max(1.0) {
        acc.value += value;
        acc.abs_err += err;
        return;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    acc.evals += 30;
    adapt(f, a, m, left, 0.5 * tol, depth + 1, acc);
    adapt(f, m, b, right, 0.5 * tol, depth + 1, acc);
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`, splitting
/// first at every breakpoint that lies strictly inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breakpoints: &[f64], abs_tol: f64) -> Integral {
    let mut acc = Integral {
        value: 0.0,
        abs_err: 0.0,
        evals: 0,
    };
    if b <= a {
        return acc;
    }
    let mut knots: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    knots.push(a);
    knots.extend(
        breakpoints
            .iter()
            .copied()
            .filter(|x| *x > a && *x < b && x.is_finite()),
    );
    knots.push(b);
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * f64::EPSILON * y.abs().max(1e-300));

    let total = b - a;
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let piece_tol = abs_tol * (hi - lo) / total;
        let first = gk15(&f, lo, hi);
        acc.evals += 15;
        adapt(&f, lo, hi, first, piece_tol, 0, &mut acc);
    }
    acc
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss–Legendre rule on `panels` uniform panels of
/// `[a, b]`, refined so that no panel straddles a breakpoint. `f` returns a
/// fixed-size vector so several coordinates share one sweep.
pub fn gauss_legendre_panels<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    breakpoints: &[f64],
) -> [f64; N] {
    let mut knots: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
    knots.extend(breakpoints.iter().copied().filter(|x| *x > a && *x < b));
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1.0));

    let mut out = [0.0; N];
    for w in knots.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (x, wt) in GL5_X.iter().zip(GL5_W.iter()) {
            let y = f(c + h * x);
            for k in 0..N {
                out[k] += wt * h * y[k];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, &[], 1e-12);
        assert!((r.value - 2.0).abs() < 1e-13, "{}", r.value);
    }

    #[test]
    fn log_singularity_converges() {
        // ∫₀¹ ln x dx = -1
        let r = integrate(|x: f64| if x > 0.0 { x.ln() } else { 0.0 }, 0.0, 1.0, &[], 1e-10);
        assert!((r.value + 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn jump_at_breakpoint_is_exact() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 5.0 };
        let r = integrate(f, 0.0, 1.0, &[0.3], 1e-12);
        assert!((r.value - (0.3 + 3.5)).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_integrates_exponential() {
        let [v] = gauss_legendre_panels(|t: f64| [t.exp()], -2.0, 3.0, 64, &[0.123]);
        assert!((v - (3f64.exp() - (-2f64).exp())).abs() < 1e-12);
    }
}
