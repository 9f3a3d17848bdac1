use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate interval ({0}, {1}]")]
    DegenerateInterval(String, String),
    #[error("support [{support_lo}, {support_hi}] escapes the window {window}")]
    WindowTooSmall {
        support_lo: String,
        support_hi: String,
        window: String,
    },
    #[error("Haar coefficient at {0} falls outside the slice; truncation would corrupt the identity")]
    TreeTouchesBoundary(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty measure")]
    EmptyMeasure,
    #[error("measure is not normalized: witness mass {mass} below a quarter of Carl = {carl}")]
    NotNormalized { mass: String, carl: String },
    #[error("power iteration did not converge after {0} steps")]
    NoConvergence(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
