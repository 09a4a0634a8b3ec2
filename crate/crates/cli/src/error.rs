use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Instability(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Instability(_) => 2,
            Self::Io(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }
}

impl From<dirac_fluid::Error> for CliError {
    fn from(e: dirac_fluid::Error) -> Self {
        use dirac_fluid::Error as E;
        match e {
            E::NumericalInstability { .. } | E::NonFinite { .. } => Self::Instability(e.to_string()),
            E::Snapshot(_) => Self::Io(e.to_string()),
            other => Self::Validation(other.to_string()),
        }
    }
}
