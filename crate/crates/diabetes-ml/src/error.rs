use std::fmt::Display;
use std::path::Path;

use diabetes_core::Error as CoreError;

/// Failure of a pipeline step, classified by who has to act on it.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad flags, config values or command sequencing.
    #[error("{0}")]
    Usage(String),
    /// Missing, malformed or unsuitable input data.
    #[error("{0}")]
    Data(String),
    /// Training or optimization broke down numerically.
    #[error("{0}")]
    Numeric(String),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Data(_) => 3,
            AppError::Numeric(_) => 4,
        }
    }

    /// Prefixes the message, keeping the classification.
    pub fn context(self, prefix: impl Display) -> Self {
        match self {
            AppError::Usage(m) => AppError::Usage(format!("{prefix}: {m}")),
            AppError::Data(m) => AppError::Data(format!("{prefix}: {m}")),
            AppError::Numeric(m) => AppError::Numeric(format!("{prefix}: {m}")),
        }
    }

    pub(crate) fn io(path: &Path, err: impl Display) -> Self {
        AppError::Data(format!("{}: {err}", path.display()))
    }
}

fn is_usage(err: &CoreError) -> bool {
    match err {
        CoreError::InvalidParameter { .. }
        | CoreError::UnknownObjective(_)
        | CoreError::UnknownModelKind(_)
        | CoreError::EmptyGrid
        | CoreError::AllExcluded
        | CoreError::Unsupported { .. }
        | CoreError::InvalidWeights => true,
        CoreError::Fold { source, .. } => is_usage(source),
        _ => false,
    }
}

impl From<CoreError> for AppError {
    fn from(err: CoreError) -> Self {
        if err.is_numeric() {
            AppError::Numeric(err.to_string())
        } else if is_usage(&err) {
            AppError::Usage(err.to_string())
        } else {
            AppError::Data(err.to_string())
        }
    }
}

pub(crate) trait Context<T> {
    fn context(self, prefix: impl Display) -> AppResult<T>;
}

impl<T, E: Into<AppError>> Context<T> for Result<T, E> {
    fn context(self, prefix: impl Display) -> AppResult<T> {
        self.map_err(|e| e.into().context(prefix))
    }
}
