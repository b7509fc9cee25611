use thiserror::Error;

pub type Result<T> = std::result::Result<T, SicError>;

#[derive(Debug, Error)]
pub enum SicError {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(i64),

    #[error("matrix is not in ESL2: determinant {det} is not +-1 mod {modulus}")]
    NotExtendedSymplectic { det: i64, modulus: i64 },

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(i64, i64),

    /// Something that the underlying group theory says cannot happen.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
