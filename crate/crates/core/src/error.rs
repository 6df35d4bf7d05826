use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IcpError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix data has {len} entries, which is not a square of a positive integer")]
    NotSquare { len: usize },

    #[error("empty vector or matrix (dimension must be at least 1)")]
    Empty,

    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("singular matrix: pivot {pivot:e} at column {column} is below threshold {threshold:e}")]
    Singular { column: usize, pivot: f64, threshold: f64 },

    #[error("diagonal scaling entry {value} at index {index} is not strictly positive")]
    NonPositiveScaling { index: usize, value: f64 },

    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("invalid delta function `{name}`: {reason}")]
    InvalidDelta { name: String, reason: String },

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("oracle requires a zero or affine implicit map")]
    NonAffineMap,

    #[error("oracle dimension {n} exceeds the cap n_max = {n_max}")]
    OracleTooLarge { n: usize, n_max: usize },

    #[error("at least one starting point is required")]
    NoStarts,
}

pub type Result<T, E = IcpError> = std::result::Result<T, E>;
