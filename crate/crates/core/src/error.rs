use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The standing-wave detuning was zero, so the light shift diverges.
    #[error("standing-wave detuning `delta` must be nonzero")]
    ZeroDetuning,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Overflow or NaN inside a solver. `context` names the frequency,
    /// step index or stage where it happened.
    #[error("numerical failure: {context}")]
    NumericalFailure { context: String },

    #[error("scenario rejected: {0}")]
    InvalidScenario(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(context: impl Into<String>) -> Self {
        Error::NumericalFailure {
            context: context.into(),
        }
    }
}
