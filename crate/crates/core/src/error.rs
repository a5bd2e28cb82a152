use thiserror::Error;

/// Errors raised by the spectral kernels, the solvers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} samples, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("time mismatch: {left} vs {right}")]
    TimeMismatch { left: f64, right: f64 },

    #[error("elliptic solvability violated: zero-mode right-hand side {mean:e}")]
    Solvability { mean: f64 },

    #[error("constraint violated: {what} = {value:e} (tolerance {tolerance:e})")]
    Constraint {
        what: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("CFL violation at t = {time}: dt = {dt:e}, suggested dt <= {suggested:e}")]
    Cfl { time: f64, dt: f64, suggested: f64 },

    #[error("non-finite values detected at t = {time}")]
    NonFinite { time: f64 },

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("rate fit: {0}")]
    Fit(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input) map to exit code 2 in the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Solvability { .. }
                | Error::Constraint { .. }
                | Error::Cfl { .. }
                | Error::NonFinite { .. }
                | Error::Fit(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
