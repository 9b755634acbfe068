use std::fmt;

use gpscav_core::Error;

/// Failure classes of a run, each with its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
    Constraint(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Constraint(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Classifies a core error raised while working on `context`.
    pub fn from_core(context: &str, e: Error) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            Error::Constraint(_) => CliError::Constraint(msg),
            Error::InvalidShape(_) | Error::Material(_) | Error::Parse { .. } | Error::InvalidArgument(_) => {
                CliError::Config(msg)
            }
            Error::Io(_) => CliError::Io(msg),
            _ => CliError::Solver(msg),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Constraint(m) => write!(f, "constraint violation: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Attaches a context string to core results.
pub trait Context<T> {
    fn ctx(self, context: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for gpscav_core::Result<T> {
    fn ctx(self, context: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::from_core(context, e))
    }
}
