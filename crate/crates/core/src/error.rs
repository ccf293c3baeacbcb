use thiserror::Error;

/// Errors raised by tree operations, ideal construction and the decision core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("string is not a node of the tree")]
    NotInTree,
    #[error("tree has no infinite branch")]
    EmptyTree,
    #[error("bounds too large: {0}")]
    BoundsTooLarge(String),
    #[error("ideal is improper: the complement of its base is finite")]
    ImproperIdeal,
    #[error("start state is not I-positive; no witness exists")]
    NotPositive,
    #[error("start state is I-positive; no small cover exists")]
    NotSmall,
    #[error("derivative method requires the Fin ideal")]
    MethodMismatch,
    #[error("cross-section is empty")]
    EmptySection,
    #[error("internal soundness failure: {0}")]
    InternalSoundness(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
