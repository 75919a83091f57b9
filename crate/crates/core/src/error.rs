//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the evaluation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// File declares a dimension, scalar type, or encoding outside the
    /// supported subset.
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// Header and payload disagree, or the payload cannot be decoded.
    #[error("corrupt file: {0}")]
    CorruptFile(String),

    /// Grid geometry violates an invariant (non-positive spacing,
    /// non-orthonormal direction matrix, size mismatch).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// Two volumes that must share a grid do not.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// An operation that needs foreground voxels got an empty mask.
    #[error("empty mask")]
    EmptyMask,

    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A team record is missing data required for ranking.
    #[error("incomplete record: {0}")]
    IncompleteRecord(String),

    /// Metric vectors do not cover the full sampling design.
    #[error("incomplete design: {0}")]
    IncompleteDesign(String),

    /// No teams available to rank.
    #[error("empty field: no teams to rank")]
    EmptyField,
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::CorruptFile(format!("csv: {other:?}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
