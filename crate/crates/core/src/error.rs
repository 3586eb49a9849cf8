use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("no convergence after {steps} steps")]
    NonConvergence { steps: usize },

    #[error("player {player} has no indifference point: best response is pure for every opponent mix")]
    NoIndifference { player: u8 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by parameters the closed forms cannot handle,
    /// as opposed to malformed input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::NonConvergence { .. } | Error::NoIndifference { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
