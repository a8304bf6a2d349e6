use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unbound level: n = {n} but the spectrum only holds levels 0..={n_max}")]
    UnboundLevel { n: usize, n_max: usize },

    #[error("eigensolver failed: {0}")]
    Solver(String),
}
