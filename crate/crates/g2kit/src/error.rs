use std::path::PathBuf;

/// Failures of a CLI command, each mapped to a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] g2kit_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },

    #[error("curves differ: {0}")]
    Mismatch(String),
}

impl CliError {
    /// 2 for configuration and parse errors, 3 for domain errors, 4 for
    /// numerical failures, 5 for a failed comparison and 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        use g2kit_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Core(E::Config(_)) => 2,
            CliError::Core(E::Domain(_)) => 3,
            CliError::Core(E::Convergence(_) | E::Singular(_) | E::Degree { .. }) => 4,
            CliError::Mismatch(_) => 5,
            CliError::Output { .. } => 1,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}
