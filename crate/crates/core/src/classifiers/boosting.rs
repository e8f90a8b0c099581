//! Gradient boosting for binary log loss.
//!
//! The model is additive in log-odds space. It starts from the prior log-odds
//! and each stage fits a depth-limited regression tree to the residuals
//! `y - sigmoid(F)` (the negative gradient). Leaf values are then replaced by
//! one Newton step, `sum(residual) / sum(p (1 - p))` over the leaf's rows,
//! before the tree is added with the learning rate as shrinkage.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{normalized, Criterion, Grower, Tree};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math::{self, logit_cross_entropy, sigmoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    initial_log_odds: f64,
    learning_rate: f64,
    stages: Vec<Tree>,
    n_features: usize,
}

pub fn train_gradient_boosting(
    train: &Dataset,
    n_stages: usize,
    max_depth: usize,
    learning_rate: f64,
) -> Result<GradientBoosting> {
    train_gradient_boosting_traced(train, n_stages, max_depth, learning_rate).map(|(m, _)| m)
}

/// Like [`train_gradient_boosting`], also returning the mean training log
/// loss after the prior (index 0) and after every stage.
pub fn train_gradient_boosting_traced(
    train: &Dataset,
    n_stages: usize,
    max_depth: usize,
    learning_rate: f64,
) -> Result<(GradientBoosting, Vec<f64>)> {
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::invalid("gb_learning_rate", "must be positive"));
    }
    if max_depth == 0 {
        return Err(Error::invalid("gb_max_depth", "must be at least 1"));
    }
    let [neg, pos] = train.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let n = train.n_rows();
    let y: Vec<f64> = train.labels().iter().map(|&l| f64::from(l)).collect();
    let initial_log_odds = math::ln(pos as f64 / neg as f64);

    let mut raw = vec![initial_log_odds; n];
    let mean_loss = |raw: &[f64]| {
        raw.iter()
            .zip(&y)
            .map(|(&z, &t)| logit_cross_entropy(z, t))
            .sum::<f64>()
            / n as f64
    };
    let mut trace = Vec::with_capacity(n_stages + 1);
    trace.push(mean_loss(&raw));

    let mut stages = Vec::with_capacity(n_stages);
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];
    for _ in 0..n_stages {
        for i in 0..n {
            let p = sigmoid(raw[i]);
            residual[i] = y[i] - p;
            hessian[i] = p * (1.0 - p);
        }
        let grower = Grower {
            data: train,
            targets: &residual,
            criterion: Criterion::Variance,
            max_depth,
            max_features: None,
        };
        let mut newton = |rows: &[usize]| {
            let num: f64 = rows.iter().map(|&i| residual[i]).sum();
            let den: f64 = rows.iter().map(|&i| hessian[i]).sum();
            if den.abs() < 1e-150 {
                0.0
            } else {
                num / den
            }
        };
        let mut tree = grower.grow((0..n).collect(), None, &mut newton);
        for v in tree.leaf_values_mut() {
            *v *= learning_rate;
        }
        for (i, z) in raw.iter_mut().enumerate() {
            *z += tree.predict(train.row(i));
        }
        stages.push(tree);
        trace.push(mean_loss(&raw));
    }
    Ok((
        GradientBoosting {
            initial_log_odds,
            learning_rate,
            stages,
            n_features: train.n_features(),
        },
        trace,
    ))
}

impl GradientBoosting {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn stages(&self) -> &[Tree] {
        &self.stages
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Log-odds score `F(x)`; leaf values already include the shrinkage.
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.initial_log_odds + self.stages.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }

    pub fn feature_importance(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for tree in &self.stages {
            for (a, v) in acc.iter_mut().zip(tree.impurity_decrease()) {
                *a += v;
            }
        }
        normalized(&acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn threshold_data() -> Dataset {
        let rows: Vec<[f64; 1]> = (0..20).map(|i| [f64::from(i)]).collect();
        let labels: Vec<u8> = (0..20).map(|i| u8::from(i >= 12)).collect();
        Dataset::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn zero_stages_predict_prevalence() {
        let data = threshold_data();
        let model = train_gradient_boosting(&data, 0, 3, 0.1).unwrap();
        for x in data.rows() {
            assert!((model.proba(x) - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_data_is_fitted() {
        let data = threshold_data();
        let model = train_gradient_boosting(&data, 20, 1, 0.1).unwrap();
        for (x, &y) in data.rows().zip(data.labels()) {
            assert_eq!(u8::from(model.proba(x) >= 0.5), y);
        }
        assert_eq!(model.feature_importance(), vec![1.0]);
    }

    #[test]
    fn training_loss_does_not_increase() {
        let data = threshold_data();
        let (_, trace) = train_gradient_boosting_traced(&data, 30, 2, 0.1).unwrap();
        for w in trace.windows(2) {
            assert!(w[1] <= w[0], "{trace:?}");
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = Dataset::from_rows(&[[0.0], [1.0]], &[0, 0]).unwrap();
        assert_eq!(
            train_gradient_boosting(&data, 5, 2, 0.1).unwrap_err(),
            Error::SingleClass
        );
    }
}
