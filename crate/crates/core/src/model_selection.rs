//! Stratified k-fold cross-validation and exhaustive grid search.
//!
//! Imputation and standardization are refitted inside every fold on the
//! training part only, so validation rows never influence the transforms
//! they are evaluated under.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{Classifier, Learner, ModelSpec};
use crate::dataset::{class_counts, MaskedDataset, Preprocessor};
use crate::error::{Error, Result};
use crate::math;
use crate::metrics::{confusion_matrix, log_loss, Metric, MetricReport, LOG_LOSS_EPSILON};

pub const DEFAULT_FOLDS: usize = 5;

/// Splits row indices into `folds` disjoint, exhaustive, class-balanced
/// folds. Each fold's indices are sorted.
pub fn stratified_k_fold(labels: &[u8], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::invalid("folds", "need at least 2 folds"));
    }
    let counts = class_counts(labels);
    for (label, &count) in counts.iter().enumerate() {
        if count < folds {
            return Err(Error::ClassTooSmall {
                label: label as u8,
                count,
                folds,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = alloc::vec![Vec::new(); folds];
    // Dealing continues round-robin across classes, which keeps fold sizes
    // within one row of each other as well as the per-class counts.
    let mut next = 0usize;
    for class in 0..2u8 {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        for i in rows {
            out[next].push(i);
            next = (next + 1) % folds;
        }
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

/// Where imputation means come from inside each fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputationScope {
    /// Means of the fold's training rows only.
    #[default]
    TrainingFold,
    /// Means over the entire dataset, validation rows included.
    WholeDataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub imputation: ImputationScope,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            seed: 0,
            imputation: ImputationScope::TrainingFold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub report: MetricReport,
    pub log_loss: f64,
    pub train_accuracy: f64,
    pub n_train: usize,
    pub n_validation: usize,
    /// Transforms fitted on this fold's training rows.
    pub preprocessor: Preprocessor,
    /// Row indices (into the cross-validated data) of the validation part.
    #[serde(default)]
    pub validation_rows: Vec<usize>,
    /// Predicted positive-class probability for each validation row.
    #[serde(default)]
    pub validation_probas: Vec<f64>,
}

/// Per-fold results for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult<C = ModelSpec> {
    pub config: C,
    pub folds: Vec<FoldResult>,
}

fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mean = math::mean(values).clamp(
        values.iter().copied().fold(f64::INFINITY, f64::min),
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    Some((mean, math::sqrt(math::population_variance(values))))
}

impl<C> CvResult<C> {
    /// Defined values of `metric` across folds.
    pub fn metric_values(&self, metric: Metric) -> Vec<f64> {
        self.folds
            .iter()
            .filter_map(|f| f.report.get(metric))
            .collect()
    }

    /// Mean and (population) standard deviation of `metric` over the folds
    /// where it is defined.
    pub fn metric_summary(&self, metric: Metric) -> Option<(f64, f64)> {
        mean_std(&self.metric_values(metric))
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.metric_summary(metric).map(|(m, _)| m)
    }

    pub fn log_loss_summary(&self) -> (f64, f64) {
        let v: Vec<f64> = self.folds.iter().map(|f| f.log_loss).collect();
        mean_std(&v).unwrap_or((f64::NAN, f64::NAN))
    }

    pub fn mean_log_loss(&self) -> f64 {
        self.log_loss_summary().0
    }

    pub fn mean_train_accuracy(&self) -> f64 {
        let v: Vec<f64> = self.folds.iter().map(|f| f.train_accuracy).collect();
        mean_std(&v).map_or(f64::NAN, |(m, _)| m)
    }

    /// Held-out probability for every row of the cross-validated data, each
    /// from the fold that did not train on it. `None` if the folds do not
    /// cover rows `0..n` exactly once.
    pub fn out_of_fold_probas(&self, n: usize) -> Option<Vec<f64>> {
        let mut out = alloc::vec![f64::NAN; n];
        let mut seen = 0;
        for fold in &self.folds {
            if fold.validation_rows.len() != fold.validation_probas.len() {
                return None;
            }
            for (&i, &p) in fold.validation_rows.iter().zip(&fold.validation_probas) {
                if i >= n || !out[i].is_nan() {
                    return None;
                }
                out[i] = p;
                seen += 1;
            }
        }
        (seen == n).then_some(out)
    }

    /// Fold means of every metric, in report column order.
    pub fn mean_report(&self) -> MetricReport {
        let [accuracy, precision, negative_predictive_value, sensitivity, specificity, f1] =
            Metric::ALL.map(|m| self.mean(m));
        MetricReport {
            accuracy,
            precision,
            negative_predictive_value,
            sensitivity,
            specificity,
            f1,
        }
    }
}

/// Trains and evaluates `learner` on every fold of `data`.
pub fn cross_validate<L: Learner + Clone>(
    data: &MaskedDataset,
    learner: &L,
    options: &CvOptions,
) -> Result<CvResult<L>> {
    let folds = stratified_k_fold(data.labels(), options.folds, options.seed)?;
    let n = data.n_rows();
    let mut results = Vec::with_capacity(folds.len());
    for (k, validation_rows) in folds.iter().enumerate() {
        let in_validation = {
            let mut mask = alloc::vec![false; n];
            validation_rows.iter().for_each(|&i| mask[i] = true);
            mask
        };
        let train_rows: Vec<usize> = (0..n).filter(|&i| !in_validation[i]).collect();
        let fold = evaluate_fold(
            data,
            &train_rows,
            validation_rows,
            learner,
            options.imputation,
        )
        .map_err(|e| Error::Fold {
            fold: k,
            source: Box::new(e),
        })?;
        results.push(fold);
    }
    Ok(CvResult {
        config: learner.clone(),
        folds: results,
    })
}

fn evaluate_fold<L: Learner>(
    data: &MaskedDataset,
    train_rows: &[usize],
    validation_rows: &[usize],
    learner: &L,
    imputation: ImputationScope,
) -> Result<FoldResult> {
    let train_raw = data.subset(train_rows);
    let validation_raw = data.subset(validation_rows);
    let preprocessor = match imputation {
        ImputationScope::TrainingFold => Preprocessor::fit(&train_raw)?,
        ImputationScope::WholeDataset => {
            Preprocessor::fit_with_imputation_source(data, &train_raw)?
        }
    };
    let train = preprocessor.apply(&train_raw)?;
    let validation = preprocessor.apply(&validation_raw)?;

    let model = learner.fit(&train)?;
    let probs = model.predict_proba_batch(&validation)?;
    let threshold = model.threshold();
    let predicted: Vec<u8> = probs.iter().map(|&p| u8::from(p >= threshold)).collect();
    let report = confusion_matrix(&predicted, validation.labels())?.report();
    let train_pred = model.predict_batch(&train)?;
    let train_correct = train_pred
        .iter()
        .zip(train.labels())
        .filter(|(a, b)| a == b)
        .count();
    Ok(FoldResult {
        report,
        log_loss: log_loss(&probs, validation.labels(), LOG_LOSS_EPSILON)?,
        train_accuracy: train_correct as f64 / train.n_rows() as f64,
        n_train: train.n_rows(),
        n_validation: validation.n_rows(),
        preprocessor,
        validation_rows: validation_rows.to_vec(),
        validation_probas: probs,
    })
}

/// Quantity a grid search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Metric(Metric),
    /// Minimize mean validation log loss.
    LogLoss,
}

impl Default for Objective {
    fn default() -> Self {
        Objective::Metric(Metric::Accuracy)
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if matches!(
            s.trim().to_ascii_lowercase().as_str(),
            "log_loss" | "logloss" | "neg_log_loss"
        ) {
            return Ok(Objective::LogLoss);
        }
        Metric::parse(s)
            .map(Objective::Metric)
            .ok_or_else(|| Error::UnknownObjective(s.to_string()))
    }
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Metric(m) => m.key(),
            Objective::LogLoss => "log_loss",
        }
    }

    /// Score to maximize; undefined metrics rank last.
    pub fn score<C>(self, result: &CvResult<C>) -> f64 {
        let v = match self {
            Objective::Metric(m) => result.mean(m),
            Objective::LogLoss => Some(-result.mean_log_loss()),
        };
        v.filter(|v| !v.is_nan()).unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult<C = ModelSpec> {
    pub best_index: usize,
    pub objective: Objective,
    /// One entry per grid point, in grid order.
    pub results: Vec<CvResult<C>>,
}

impl<C> GridSearchResult<C> {
    pub fn best(&self) -> &CvResult<C> {
        &self.results[self.best_index]
    }
}

/// Cross-validates every configuration and picks the highest objective;
/// exact ties go to the earliest grid position.
pub fn grid_search<L: Learner + Clone>(
    data: &MaskedDataset,
    grid: &[L],
    options: &CvOptions,
    objective: Objective,
) -> Result<GridSearchResult<L>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let results = grid
        .iter()
        .map(|l| cross_validate(data, l, options))
        .collect::<Result<Vec<_>>>()?;
    let best_index = select_best(&results, objective);
    Ok(GridSearchResult {
        best_index,
        objective,
        results,
    })
}

pub(crate) fn select_best<C>(results: &[CvResult<C>], objective: Objective) -> usize {
    let mut best = 0;
    let mut best_score = objective.score(&results[0]);
    for (i, r) in results.iter().enumerate().skip(1) {
        let s = objective.score(r);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// A point on a hyperparameter error curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub value: String,
    /// `1 - mean training accuracy` over the folds.
    pub train_error: f64,
    /// `1 - mean validation accuracy`.
    pub validation_error: f64,
    pub validation_error_std: f64,
}

/// Training and validation error against the swept hyperparameter `param`.
pub fn error_curve(results: &[CvResult<ModelSpec>], param: &str) -> Result<Vec<CurvePoint>> {
    results
        .iter()
        .map(|r| {
            let value = r.config.params.get(param).ok_or_else(|| {
                Error::invalid("param", alloc::format!("unknown hyperparameter `{param}`"))
            })?;
            let (acc, sd) = r
                .metric_summary(Metric::Accuracy)
                .unwrap_or((f64::NAN, f64::NAN));
            Ok(CurvePoint {
                value,
                train_error: 1.0 - r.mean_train_accuracy(),
                validation_error: 1.0 - acc,
                validation_error_std: sd,
            })
        })
        .collect()
}
