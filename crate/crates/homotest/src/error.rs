use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} has norm below 1e-12 and cannot be normalized")]
    ZeroNormPoint(usize),
    #[error("parse error at line {0}")]
    ParseError(usize),
    #[error("input file contains no points")]
    EmptyFile,
    #[error("Čech complexes are only supported in ambient dimension <= 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("Betti vectors have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("{0}")]
    Domain(String),
    #[error("interval endpoints out of order: {0} > {1}")]
    OrderViolation(f64, f64),
    #[error("filtration entry {0} precedes one of its faces")]
    InvalidFiltration(usize),
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
