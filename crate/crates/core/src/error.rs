use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed numerical input (dimension mismatch, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian: |A[{row}][{col}] - conj(A[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    /// The request contradicts a security assumption the analysis relies on.
    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
