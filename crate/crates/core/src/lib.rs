//! Scale-robust (prior-independent) auctions for two bidders.
//!
//! Stochastic markup mechanisms are evaluated on regular distributions given
//! by piecewise-linear revenue curves. The `solver` module plays them against
//! an adversary choosing a triangle distribution and certifies the resulting
//! equilibrium on grids.
//!
//! ```
//! use scale_robust::{analytic, revcurve::TriangleParams};
//!
//! let t = TriangleParams::new(0.3).unwrap();
//! let m = analytic::markup_revenue_triangle(2.0, t.q_bar()).unwrap();
//! let q = analytic::markup_revenue_curve(2.0, &t.curve().unwrap()).unwrap();
//! assert!((m - q).abs() < 1e-9);
//! ```

// NaN must fail parameter checks, so `!(x > a)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod checks;
pub mod cli;
pub mod error;
pub mod mechanisms;
pub mod oracle;
pub mod paradigms;
pub mod quadrature;
pub mod revcurve;
pub mod solver;
pub mod symmetrize;

pub use error::{Error, Result};

/// Published equilibrium numerals, rounded as printed.
pub mod reference {
    pub const Q_STAR: f64 = 0.0931057;
    pub const R_STAR: f64 = 2.4469452;
    pub const ALPHA_STAR: f64 = 0.80564048;
    pub const BETA: f64 = 1.9068943;
    /// Interval certified to contain the worst-case monopoly quantile.
    pub const Q_STAR_INTERVAL: (f64, f64) = (0.09310569, 0.09310571);
}
