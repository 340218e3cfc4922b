//! Library-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("parse error at {line}:{col}: {message}")]
    Parse { line: u32, col: u32, message: String },

    #[error("universe of {size} variables exceeds enumeration cap {cap}")]
    UniverseTooLarge { size: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}
