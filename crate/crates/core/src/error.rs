use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A search hit its node limit before reaching an answer.
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    /// An enumeration or construction would exceed its configured cap.
    #[error("cap exceeded: {what} needs {required}, cap is {cap}")]
    CapExceeded {
        what: String,
        required: u128,
        cap: u128,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for outcomes that are "could not decide" rather than a definite answer.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
