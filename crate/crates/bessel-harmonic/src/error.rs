use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("no convergence: {0}")]
    ConvergenceFailure(String),
    #[error("tolerance not met: estimate {estimate:e}, error {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },
    #[error("tail bound {tail:e} dominates the tolerance")]
    TailDominates { tail: f64 },
    #[error("input is not Hoelder continuous near {0}")]
    NonHolder(f64),
    #[error("point too close to the diagonal: x = {x}, y = {y}")]
    Diagonal { x: f64, y: f64 },
    #[error("ill-conditioned evaluation: {0}")]
    IllConditioned(String),
    #[error("divergent integral: {0}")]
    Divergence(String),
    #[error("degenerate construction: {0}")]
    Degenerate(String),
}

impl Error {
    /// True for parameter or usage problems, false for numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Pole(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
