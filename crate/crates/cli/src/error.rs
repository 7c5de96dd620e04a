use std::fmt;

/// Failure classes, each mapped to its own process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration.
    Usage(String),
    /// A solver or I/O failure during a run.
    Run(anyhow::Error),
    /// `verify` found failing checks.
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Run(_) => 2,
            CliError::Verification { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Run(err) => write!(f, "run failed: {err:#}"),
            CliError::Verification { failed, total } => {
                write!(f, "verification failed: {failed} of {total} checks failed")
            }
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Run(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Run(err.into())
    }
}

/// Turns a validation error from the core crate into a usage error.
pub fn usage<E: fmt::Display>(err: E) -> CliError {
    CliError::Usage(err.to_string())
}
