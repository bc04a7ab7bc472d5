use std::path::Path;

/// CLI failure, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{0}")]
    Convergence(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<geoadapt::Error> for CliError {
    fn from(e: geoadapt::Error) -> Self {
        use geoadapt::Error as E;
        match e {
            E::Convergence { .. } | E::SingularMetric(_) | E::Logic(_) => CliError::Convergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
