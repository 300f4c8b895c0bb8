use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectral parameter {0} lies outside the bulk (-2, 2)")]
    OutsideBulk(f64),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("tridiagonal solver breakdown at row {row}")]
    SolverBreakdown { row: usize },

    #[error("unsupported size {n} for exact expansion (max {max})")]
    Unsupported { n: usize, max: usize },

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("computation cancelled")]
    Cancelled,

    #[error("quadrature did not converge: change {change:e} exceeds {tolerance:e}")]
    Accuracy { change: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
