use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn field(name: &str, reason: &str) -> Self {
        CliError::Validation(format!("{name}: {reason}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<scouting_core::Error> for CliError {
    fn from(e: scouting_core::Error) -> Self {
        use scouting_core::Error as E;
        match e {
            E::Domain { name, value } => CliError::Validation(format!("{name}: {value} is outside [0, 1]")),
            E::Invalid { field, reason } => CliError::Validation(format!("{field}: {reason}")),
            other => CliError::Degenerate(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
