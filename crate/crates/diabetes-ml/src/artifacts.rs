//! JSON artifacts written between pipeline steps. Every artifact records the
//! schema version and the seed of the run that produced it.

use std::io::Write;
use std::path::Path;

use diabetes_core::dataset::Preprocessor;
use diabetes_core::model_selection::Objective;
use diabetes_core::{EnsembleModel, HyperParams, MetricReport, ModelKind, TrainedModel};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};
use crate::io::create_file;

pub const SCHEMA_VERSION: u32 = 1;

/// Sidecar of `prepare`: how the processed splits were made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareRecord {
    pub schema_version: u32,
    pub seed: u64,
    pub source: String,
    pub test_fraction: f64,
    pub paper_faithful: bool,
    pub label: String,
    pub feature_names: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub train_class_counts: [usize; 2],
    pub test_class_counts: [usize; 2],
    /// Imputation means and standardization parameters.
    pub preprocessor: Preprocessor,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub schema_version: u32,
    pub seed: u64,
    pub kind: ModelKind,
    pub params: HyperParams,
    pub feature_names: Vec<String>,
    /// Transforms to apply to raw rows before calling the model.
    pub preprocessor: Preprocessor,
    pub model: TrainedModel,
    pub test_report: MetricReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvBest {
    pub schema_version: u32,
    pub seed: u64,
    pub kind: ModelKind,
    pub objective: Objective,
    pub folds: usize,
    pub best_index: usize,
    pub params: HyperParams,
    pub mean_report: MetricReport,
    pub mean_log_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleArtifact {
    pub schema_version: u32,
    pub seed: u64,
    pub members: Vec<ModelKind>,
    /// Weights as used (normalized for optimized runs, verbatim for supplied
    /// ones).
    pub weights: Vec<f64>,
    pub validation_log_loss: f64,
    pub member_validation_log_loss: Vec<f64>,
    pub feature_names: Vec<String>,
    pub preprocessor: Preprocessor,
    pub ensemble: EnsembleModel,
    pub test_report: MetricReport,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut file = create_file(path)?;
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| AppError::io(path, e))?;
    file.write_all(b"\n")
        .and_then(|_| file.flush())
        .map_err(|e| AppError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| AppError::io(path, e))?;
    match value
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
    {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(AppError::Data(format!(
                "{}: schema version {v} is not supported (expected {SCHEMA_VERSION})",
                path.display()
            )))
        }
        None => {
            return Err(AppError::Data(format!(
                "{}: missing schema_version",
                path.display()
            )))
        }
    }
    serde_json::from_value(value).map_err(|e| AppError::io(path, e))
}
