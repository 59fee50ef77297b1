use thiserror::Error;

/// Everything that can go wrong between reading a series and emitting a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined robust CV")]
    UndefinedRobustCv,

    #[error("no variables retained")]
    NoVariablesRetained,

    #[error("dimension cap too generous for these active-set sizes (projected {projected} subset visits, budget {budget})")]
    WorkBudgetExceeded { projected: u128, budget: u64 },

    #[error("full table requires uncapped complex")]
    FullTableRequiresUncapped,

    #[error("insufficient stored dimension (need {needed}, stored {stored})")]
    InsufficientStoredDimension { needed: usize, stored: usize },

    #[error("chain not supported in frame")]
    ChainNotInFrame,

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("Euler budget exceeded ({budget} node visits)")]
    EulerBudgetExceeded { budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the errors raised when a configured work budget would be exceeded.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::WorkBudgetExceeded { .. } | Error::EulerBudgetExceeded { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
