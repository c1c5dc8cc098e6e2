use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input, config or arguments.
    #[error("{0}")]
    Validation(String),
    /// The solver found no solution meeting the constraints.
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Validation(format!("{}: {e}", path.display()))
    }

    /// Wrap a library failure with the stage it came from.
    pub fn stage(stage: &str, e: combclust::Error) -> Self {
        if e.is_infeasible() {
            CliError::Infeasible(format!("{stage}: {e}"))
        } else {
            CliError::Validation(format!("{stage}: {e}"))
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

/// Attach a stage name to library results.
pub trait StageExt<T> {
    fn stage(self, stage: &str) -> Result<T, CliError>;
}

impl<T> StageExt<T> for combclust::Result<T> {
    fn stage(self, stage: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::stage(stage, e))
    }
}
