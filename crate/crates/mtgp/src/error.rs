use thiserror::Error;

/// Errors raised by model construction, factorization, and fitting.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix that must be symmetric positive definite failed to factor.
    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: &'static str },

    /// Symmetric eigendecomposition did not converge, or produced an
    /// eigenvalue below the negativity tolerance.
    #[error("eigendecomposition failed ({0})")]
    Eigen(String),

    /// The conjugate-gradient solver hit its iteration cap before reaching
    /// the requested residual.
    #[error("conjugate gradient did not converge within {iterations} iterations (relative residual {residual:.3e})")]
    CgIterationLimit { iterations: usize, residual: f64 },

    /// Invalid data passed to a constructor or operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Task {task} has no observed outputs.
    #[error("task {task} has no observations")]
    EmptyTask { task: usize },

    /// Every optimization restart failed numerically.
    #[error("fit failed: {0}")]
    FitFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
