use thiserror::Error;

/// Errors produced by matrix ingestion, factorization and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Parse failure in a text input (Matrix Market, permutation or vector
    /// file), with the 1-based line number of the offending line.
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("drop tolerance must be finite and >= 0, got {0}")]
    InvalidDropTolerance(f64),

    /// NaN or Inf appeared while factorizing the given (0-based) column.
    #[error("non-finite value while factorizing column {column}")]
    NonFinite { column: usize },

    /// Positive-definite pivoting found a nonpositive quadratic form.
    #[error("matrix not positive definite (z_j^T A z_j <= 0 at column {column})")]
    NotPositiveDefinite { column: usize },

    #[error("non-finite value in right-hand side")]
    NonFiniteRhs,

    /// NaN or Inf appeared in the Krylov iteration.
    #[error("non-finite value at solver iteration {iteration}")]
    NonFiniteIteration { iteration: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
