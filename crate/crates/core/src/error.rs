use thiserror::Error;

/// Errors raised by constructors and solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid revenue curve: {0}")]
    InvalidCurve(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid markup mixture: {0}")]
    InvalidMixture(String),

    #[error("curve is not normalized (max revenue {0}, expected 1)")]
    NotNormalized(f64),

    #[error("unbounded support: top of support {0} exceeds the sampling limit")]
    UnboundedSupport(f64),

    #[error("bracket [{lo}, {hi}] does not contain a sign change")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("equilibrium validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
