//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the kernel evaluators, estimators and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("accuracy not met: estimated error {est_error:e} exceeds tolerance {tol:e}")]
    AccuracyNotMet { est_error: f64, tol: f64 },

    #[error("kernel is singular on the diagonal x = y")]
    DiagonalSingularity,

    #[error("t-integral diverges: zero drift with order k = {k} >= Q = {q}")]
    DivergentIntegral { k: u32, q: usize },

    #[error("degenerate estimate: no Monte-Carlo sample landed in the ball")]
    DegenerateEstimate,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
