use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular or rank deficient (pivot {pivot:e} below tolerance {tol:e})")]
    Singular { pivot: f64, tol: f64 },

    #[error("matrix is not positive definite (pivot {0:e} at index {1})")]
    NotPositiveDefinite(f64, usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("bias schedule infeasible: eta {eta:e} exceeds det(I+rho H^H H) = {det:e}")]
    InfeasibleSchedule { eta: f64, det: f64 },

    #[error("shortest-vector enumeration exceeded its budget of {0} nodes")]
    GeometryUnavailable(u64),

    #[error("brute-force search space of {0} points exceeds the budget")]
    BudgetExceeded(u128),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("not enough usable points for a fit ({0} < 3)")]
    Fit(usize),

    #[error("empty sample set")]
    Empty,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {what}: {msg}")]
    Parse { what: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
