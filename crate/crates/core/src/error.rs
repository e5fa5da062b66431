use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("solver did not converge within {max_cycles} cycles (last max coefficient change {last_change:.3e})")]
    NonConvergence { max_cycles: usize, last_change: f64 },

    #[error("column {name:?} is almost exactly reproduced by the remaining columns (R^2 = {r_squared:.6}); remove collinear variables before generating knockoffs")]
    Collinearity { name: String, r_squared: f64 },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
