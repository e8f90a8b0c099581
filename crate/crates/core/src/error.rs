use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("no data rows")]
    NoDataRows,
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value {value} at position {index} is not a binary label")]
    NonBinaryLabel { index: usize, value: f64 },
    #[error("column `{0}` has no non-missing training values")]
    ColumnAllMissing(String),
    #[error("need at least {needed} rows, found {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("class {label} has no rows")]
    EmptyClass { label: u8 },
    #[error("class {label} has {count} rows, fewer than the {folds} folds requested")]
    ClassTooSmall {
        label: u8,
        count: usize,
        folds: usize,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("feature dimension mismatch: model expects {expected}, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("patient `{0}` has no visit records")]
    NoVisits(String),
    #[error("training diverged: non-finite loss at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("{operation} is not supported for {kind} models")]
    Unsupported {
        kind: &'static str,
        operation: &'static str,
    },
    #[error("ensemble weights must be finite, non-negative and not all zero")]
    InvalidWeights,
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: Box<Error> },
    #[error("unknown objective `{0}`")]
    UnknownObjective(String),
    #[error("unknown model kind `{0}`")]
    UnknownModelKind(String),
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("every candidate member was excluded")]
    AllExcluded,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by the numerics (divergence) rather than the
    /// shape or content of the inputs.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Diverged { .. } => true,
            Error::Fold { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
