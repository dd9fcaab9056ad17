use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid machine: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] nfst_core::Error),
}

impl CliError {
    /// 1 for domain failures, 2 for malformed or non-functional input.
    pub fn exit_code(&self) -> i32 {
        use nfst_core::Error as E;
        match self {
            CliError::Core(
                E::FunctionalConflict { .. }
                | E::EpsilonOutput { .. }
                | E::Inconsistent { .. }
                | E::ReservedSymbol(_)
                | E::UnknownSymbol(_),
            ) => 1,
            _ => 2,
        }
    }
}
