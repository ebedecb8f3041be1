use thiserror::Error;

/// Errors raised by the algebraic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    #[error("element {element} is not valid for this group: {reason}")]
    InvalidElement { element: String, reason: String },

    #[error("operands belong to different contexts")]
    ContextMismatch,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid quadratic module: {0}")]
    InvalidModule(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal check failed: {0}")]
    InternalCheckFailed(String),

    #[error("enumeration exceeds budget of {budget} candidates")]
    BudgetExceeded { budget: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolation(msg.into())
    }
}
