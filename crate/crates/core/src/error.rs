use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is bounded (H(∞) < ∞); operation requires an unbounded distribution function")]
    Bounded,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{x} is outside the valid range [{lo}, {hi}]")]
    Range { x: f64, lo: f64, hi: f64 },

    #[error("construction failed in block {block}: {msg}")]
    Construction { block: usize, msg: String },

    #[error("need at least {need} rows, got {got}")]
    InsufficientRows { need: usize, got: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidMeasure(msg.into())
    }
}

pub(crate) fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::domain(format!("{name} must be nonnegative, got {v}")));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v <= 0.0 {
        return Err(Error::domain(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}
