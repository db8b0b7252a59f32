use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the solver, the generators and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Inner Jacobi diagonalization ran out of sweeps. Carries the best
    /// off-norm reached; on Hermitian input this signals a corrupted core.
    #[error("convergence failure: off-norm {best_off:.3e} after {sweeps} sweeps (target {target:.3e})")]
    ConvergenceFailure {
        best_off: f64,
        target: f64,
        sweeps: usize,
    },

    /// NaN or Inf appeared in an iterate. The context, when present,
    /// carries the last finite iterate and the log up to the failure.
    #[error("numerical failure during cycle {cycle}: {message}")]
    NumericalFailure {
        cycle: usize,
        message: String,
        context: Option<Box<crate::driver::FailureContext>>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
