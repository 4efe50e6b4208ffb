use thiserror::Error;

/// Failures of a CLI run, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or values on the command line.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or invalid configuration.
    #[error("config: {0}")]
    Config(String),
    /// The mechanism cannot do what was asked (unreachable pose, singularity, ...).
    #[error(transparent)]
    Domain(#[from] vertebra_core::error::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for domain errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            _ => 1,
        }
    }
}
