use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid tilt family: {0}")]
    InvalidFamily(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("improper function: {0}")]
    Improper(String),
    #[error("limit not converged: {0}")]
    NotConverged(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
