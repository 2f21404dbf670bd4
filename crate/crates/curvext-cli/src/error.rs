//! Command failures and their process exit codes.

use thiserror::Error;

/// Exit status when every criterion passes.
pub const EXIT_PASS: u8 = 0;
/// Exit status when the run completed but a criterion failed.
pub const EXIT_CRITERION: u8 = 2;
/// Exit status for unreadable, malformed or invalid configurations.
pub const EXIT_CONFIG: u8 = 3;
/// Exit status when a numerical routine fails.
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<curvext::Error> for CliError {
    fn from(e: curvext::Error) -> Self {
        match e {
            curvext::Error::InvalidInput(m) => CliError::Config(m),
            curvext::Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Shorthand for a configuration error.
pub fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}
