//! Supervised binary classification toolkit for clinical risk prediction.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every algorithmic piece
//! of the pipeline: feature engineering over longitudinal vitals, seven
//! classifiers behind one train/predict contract, evaluation metrics,
//! stratified cross-validation with grid search, and a weighted soft-voting
//! ensemble whose weights are fitted by minimizing log loss.
//!
//! File formats, the command-line front end and anything else touching the
//! operating system live in the `diabetes-ml` companion crate.

#![no_std]
#![forbid(unsafe_code)]
// Matrix code indexes rows and columns explicitly.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classifiers;
pub mod dataset;
pub mod ensemble;
mod error;
pub mod math;
pub mod metrics;
pub mod model_selection;
pub mod optim;
pub mod synthetic;
pub mod vitals;

pub use classifiers::{HyperParams, ModelKind, ModelSpec, TrainedModel};
pub use dataset::{Dataset, MaskedDataset};
pub use ensemble::EnsembleModel;
pub use error::{Error, Result};
pub use metrics::{ConfusionMatrix, MetricReport};
pub use model_selection::CvResult;

/// Default decision threshold shared by classifiers and ensembles.
///
/// A probability exactly equal to the threshold is assigned to the positive
/// class.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
