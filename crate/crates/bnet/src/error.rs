//! Crate-wide error type.
//!
//! Errors fall into three layers that callers (notably the CLI) treat
//! differently:
//!
//! - [`ErrorKind::Parse`] — the input text could not be read at all
//!   (lexical or grammatical problems, with a line/column position);
//! - [`ErrorKind::Semantic`] — the input parsed but is not a meaningful
//!   definition (unknown or duplicated variables, out-of-range state
//!   indices, size caps);
//! - [`ErrorKind::Precondition`] — a well-formed object was handed to an
//!   operation whose contract it does not satisfy (dimension mismatches,
//!   disconnected graphs given to engines that require connectivity).

use thiserror::Error;

/// Coarse classification of an [`Error`], used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input text could not be parsed.
    Parse,
    /// Input parsed but is semantically invalid.
    Semantic,
    /// An operation's precondition was violated.
    Precondition,
}

/// Error type shared by every fallible operation in this crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Lexical or grammatical error in an input text, with its position.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        /// 1-based line of the offending token.
        line: usize,
        /// 1-based column of the offending token.
        column: usize,
        /// Human-readable description of what went wrong.
        message: String,
    },

    /// A variable is used but never declared.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// A variable or output name is declared more than once.
    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    /// A declared variable has more than one update rule.
    #[error("duplicate update for variable `{0}`")]
    DuplicateUpdate(String),

    /// A declared variable has no update rule.
    #[error("missing update for variable `{0}`")]
    MissingUpdate(String),

    /// The network exceeds the configured variable cap.
    #[error("network has {n} variables, exceeding the cap of {max} (set BN_MAX_VARS to raise it)")]
    TooManyVariables {
        /// Number of variables the network declares.
        n: usize,
        /// Active cap.
        max: usize,
    },

    /// A state/vertex index or index set is out of range or malformed.
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    /// A structurally invalid object was constructed (bad column index,
    /// malformed successor array, malformed partition).
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// Matrix dimensions do not fit the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An engine that requires a connected graph was given a disconnected one.
    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    /// A generic precondition violation not covered above.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// The coarse layer this error belongs to.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::UnknownVariable(_)
            | Error::DuplicateName(_)
            | Error::DuplicateUpdate(_)
            | Error::MissingUpdate(_)
            | Error::TooManyVariables { .. }
            | Error::InvalidIndexSet(_)
            | Error::InvalidStructure(_) => ErrorKind::Semantic,
            Error::Dimension(_) | Error::Disconnected(_) | Error::Precondition(_) => {
                ErrorKind::Precondition
            }
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
