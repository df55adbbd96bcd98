use thiserror::Error;

/// Failures of a CLI command, classified by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration or query: exit status 2.
    #[error("{0}")]
    Usage(String),
    /// Anything that went wrong while doing the work: exit status 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<ensel_core::Error> for CliError {
    fn from(e: ensel_core::Error) -> Self {
        use ensel_core::Error as E;
        match e {
            E::Config { .. } | E::Generation { .. } | E::UnimplementedStrategy(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
