use thiserror::Error;

/// Library-wide error type. Variants are grouped by how a caller should react:
/// `Config`/`Unsupported`/`Mismatch` mean the request itself is malformed,
/// `Aliasing`/`InsufficientData`/`UndefinedFit`/`Numeric` mean the inputs were
/// legal but the computation cannot produce a trustworthy answer.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside its documented domain (bad ladder, p <= 0, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Operation not defined for the requested group.
    #[error("unsupported for this group: {0}")]
    Unsupported(String),

    /// Two arguments disagree about the group, window, or shape they belong to.
    #[error("mismatched arguments: {0}")]
    Mismatch(String),

    /// Truncation window contains no dual points.
    #[error("empty truncation window at lambda = {lambda}")]
    EmptyWindow { lambda: f64 },

    /// Quadrature grid too coarse for the requested band content.
    #[error("grid resolution {got} below required {required}: {context}")]
    Aliasing {
        required: usize,
        got: usize,
        context: String,
    },

    /// Not enough ladder rungs (or shells) to fit a tail exponent.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A log-log fit over an identically vanishing sample set.
    #[error("undefined fit: {0}")]
    UndefinedFit(String),

    /// Non-finite values or a linear-algebra routine that failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed on-disk artifact (operator export, config file).
    #[error("parse failure: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
