//! Error classes mapped to process exit codes.

/// CLI failure, classified for the exit status: configuration and I/O
/// problems exit with 2, numerical/model failures with 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, unparsable, or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Model evaluation failed (instability, domain, admissibility).
    #[error("numerical error: {0}")]
    Numerical(#[from] ris_core::Error),

    /// Output could not be written.
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}
