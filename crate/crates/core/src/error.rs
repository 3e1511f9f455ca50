use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The simultaneous iteration ran out of iterations. Carries the best
    /// iterate so callers can inspect how far off it was.
    #[error("root finder did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex64>,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error("root finding failed at mu = {mu}: {source}")]
    RootsAtMultiplier { mu: f64, source: Box<Error> },

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
