//! Binary confusion matrix, the six threshold metrics derived from it, and
//! log loss.
//!
//! Ratios whose denominator is zero are reported as `None` rather than 0 so
//! that degenerate predictors (for example one that never predicts the
//! negative class) still produce a full report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// Default probability clip for [`log_loss`].
pub const LOG_LOSS_EPSILON: f64 = 1e-15;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Actual positives.
    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    /// Actual negatives.
    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }

    pub fn report(&self) -> MetricReport {
        metric_suite(self)
    }
}

fn check_binary(values: &[u8]) -> Result<()> {
    match values.iter().position(|&v| v > 1) {
        Some(index) => Err(Error::NonBinaryLabel {
            index,
            value: f64::from(values[index]),
        }),
        None => Ok(()),
    }
}

/// Counts the four outcomes of `predicted` against `actual`.
pub fn confusion_matrix(predicted: &[u8], actual: &[u8]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::NoDataRows);
    }
    check_binary(predicted)?;
    check_binary(actual)?;
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (1, 1) => cm.tp += 1,
            (1, 0) => cm.fp += 1,
            (0, 0) => cm.tn += 1,
            _ => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// The six evaluation metrics, in report column order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub negative_predictive_value: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
}

/// Identifies one metric of a [`MetricReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Accuracy,
    Precision,
    NegativePredictiveValue,
    Sensitivity,
    Specificity,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Accuracy,
        Metric::Precision,
        Metric::NegativePredictiveValue,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::F1,
    ];

    /// Column header used in reports.
    pub fn title(self) -> &'static str {
        match self {
            Metric::Accuracy => "Accuracy",
            Metric::Precision => "Precision",
            Metric::NegativePredictiveValue => "Negative Prediction",
            Metric::Sensitivity => "Sensitivity",
            Metric::Specificity => "Specificity",
            Metric::F1 => "F1-Score",
        }
    }

    /// Machine-friendly name, also accepted by [`Metric::parse`].
    pub fn key(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::NegativePredictiveValue => "npv",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::F1 => "f1",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let lower = name.trim().to_ascii_lowercase();
        Some(match lower.as_str() {
            "accuracy" => Metric::Accuracy,
            "precision" => Metric::Precision,
            "npv" | "negative_predictive_value" | "negative prediction" => {
                Metric::NegativePredictiveValue
            }
            "sensitivity" | "recall" => Metric::Sensitivity,
            "specificity" => Metric::Specificity,
            "f1" | "f1-score" | "f1_score" => Metric::F1,
            _ => return None,
        })
    }
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::NegativePredictiveValue => self.negative_predictive_value,
            Metric::Sensitivity => self.sensitivity,
            Metric::Specificity => self.specificity,
            Metric::F1 => self.f1,
        }
    }

    pub fn values(&self) -> [Option<f64>; 6] {
        Metric::ALL.map(|m| self.get(m))
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Harmonic mean of precision and sensitivity; `None` when both are zero.
pub fn f1_score(precision: f64, sensitivity: f64) -> Option<f64> {
    let sum = precision + sensitivity;
    (sum > 0.0).then(|| 2.0 * precision * sensitivity / sum)
}

pub fn metric_suite(cm: &ConfusionMatrix) -> MetricReport {
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let sensitivity = ratio(cm.tp, cm.tp + cm.fn_);
    // 2tp / (2tp + fp + fn) is the harmonic mean wherever that is defined and
    // extends it to 0 when tp = 0 but both ratios exist.
    let f1 = match (precision, sensitivity) {
        (Some(_), Some(_)) => ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_),
        _ => None,
    };
    MetricReport {
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        precision,
        negative_predictive_value: ratio(cm.tn, cm.tn + cm.fn_),
        sensitivity,
        specificity: ratio(cm.tn, cm.tn + cm.fp),
        f1,
    }
}

/// Mean binary cross-entropy with probabilities clipped to
/// `[epsilon, 1 - epsilon]`.
pub fn log_loss(probabilities: &[f64], actual: &[u8], epsilon: f64) -> Result<f64> {
    if probabilities.len() != actual.len() {
        return Err(Error::LengthMismatch {
            expected: actual.len(),
            found: probabilities.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::NoDataRows);
    }
    check_binary(actual)?;
    let total: f64 = probabilities
        .iter()
        .zip(actual)
        .map(|(&p, &y)| {
            let p = p.clamp(epsilon, 1.0 - epsilon);
            if y == 1 {
                -math::ln(p)
            } else {
                -math::ln(1.0 - p)
            }
        })
        .sum();
    Ok(total / actual.len() as f64)
}
