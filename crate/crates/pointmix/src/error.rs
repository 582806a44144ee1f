//! Crate-wide error type.

use crate::emd::EmdResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input data violates a precondition (non-finite coordinate, empty cloud, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter is outside its legal range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The problem size exceeds what the requested solver handles.
    #[error("capacity: {0}")]
    Capacity(String),

    /// An iterative solver ran out of budget; `best` is the best valid
    /// assignment found so far.
    #[error("solver failure: {reason}")]
    SolverFailure {
        reason: String,
        best: Box<EmdResult>,
    },

    /// Malformed input file; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Training diverged or produced non-finite values.
    #[error("training error: {0}")]
    Train(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
