//! Linear soft-margin SVM trained with Pegasos-style stochastic subgradient
//! descent, plus a two-parameter logistic (Platt) map from decision scores
//! to probabilities.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math::{self, logit_cross_entropy, sigmoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    weights: Vec<f64>,
    bias: f64,
    calibration: PlattScaling,
}

/// `p = sigmoid(slope * score + intercept)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattScaling {
    pub slope: f64,
    pub intercept: f64,
}

impl PlattScaling {
    pub fn apply(&self, score: f64) -> f64 {
        sigmoid(self.slope * score + self.intercept)
    }

    /// Fits the map by Newton's method with backtracking on the
    /// cross-entropy against Platt's smoothed targets.
    pub fn fit(scores: &[f64], labels: &[u8]) -> Self {
        let n_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
        let n_neg = labels.len() as f64 - n_pos;
        let hi = (n_pos + 1.0) / (n_pos + 2.0);
        let lo = 1.0 / (n_neg + 2.0);
        let targets: Vec<f64> = labels
            .iter()
            .map(|&l| if l == 1 { hi } else { lo })
            .collect();

        let objective = |a: f64, b: f64| -> f64 {
            scores
                .iter()
                .zip(&targets)
                .map(|(&s, &t)| logit_cross_entropy(a * s + b, t))
                .sum()
        };

        let mut a = 0.0;
        let mut b = math::ln((n_pos + 1.0) / (n_neg + 1.0));
        let mut f = objective(a, b);
        for _ in 0..100 {
            let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 1e-12, 0.0, 1e-12);
            for (&s, &t) in scores.iter().zip(&targets) {
                let p = sigmoid(a * s + b);
                let w = p * (1.0 - p);
                ga += (p - t) * s;
                gb += p - t;
                haa += w * s * s;
                hab += w * s;
                hbb += w;
            }
            if ga.abs() < 1e-10 && gb.abs() < 1e-10 {
                break;
            }
            let det = haa * hbb - hab * hab;
            let da = -(hbb * ga - hab * gb) / det;
            let db = -(haa * gb - hab * ga) / det;
            let slope = ga * da + gb * db;
            let mut step = 1.0;
            let mut improved = false;
            while step >= 1e-10 {
                let (na, nb) = (a + step * da, b + step * db);
                let nf = objective(na, nb);
                if nf <= f + 1e-4 * step * slope {
                    a = na;
                    b = nb;
                    f = nf;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        Self {
            slope: a,
            intercept: b,
        }
    }
}

pub fn train_linear_svm(train: &Dataset, c: f64, epochs: usize, seed: u64) -> Result<LinearSvm> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("svm_c", "must be positive"));
    }
    if epochs == 0 {
        return Err(Error::invalid("svm_epochs", "must be at least 1"));
    }
    let [neg, pos] = train.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }

    let n = train.n_rows();
    let d = train.n_features();
    let lambda = 1.0 / (c * n as f64);
    let radius = 1.0 / math::sqrt(lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();

    // The bias is carried as the weight of a constant input, so it is
    // regularized together with the rest of the hyperplane.
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut w_avg = vec![0.0; d];
    let mut b_avg = 0.0;
    let mut t = 0usize;
    for epoch in 0..epochs {
        order.shuffle(&mut rng);
        let last = epoch + 1 == epochs;
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = train.row(i);
            let y = if train.labels()[i] == 1 { 1.0 } else { -1.0 };
            let score = dot(&w, x) + b;
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            b *= shrink;
            if y * score < 1.0 {
                for (v, xi) in w.iter_mut().zip(x) {
                    *v += eta * y * xi;
                }
                b += eta * y;
            }
            let norm = math::sqrt(dot(&w, &w) + b * b);
            if norm > radius {
                let scale = radius / norm;
                w.iter_mut().for_each(|v| *v *= scale);
                b *= scale;
            }
            if last {
                for (a, v) in w_avg.iter_mut().zip(&w) {
                    *a += v;
                }
                b_avg += b;
            }
        }
    }
    let inv = 1.0 / n as f64;
    w_avg.iter_mut().for_each(|v| *v *= inv);
    b_avg *= inv;
    if w_avg.iter().any(|v| !v.is_finite()) || !b_avg.is_finite() {
        return Err(Error::Diverged { epoch: epochs });
    }

    let scores: Vec<f64> = train.rows().map(|x| dot(&w_avg, x) + b_avg).collect();
    let calibration = PlattScaling::fit(&scores, train.labels());
    Ok(LinearSvm {
        weights: w_avg,
        bias: b_avg,
        calibration,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearSvm {
    /// Builds a model from an explicit hyperplane and calibration.
    pub fn from_parts(weights: Vec<f64>, bias: f64, calibration: PlattScaling) -> Self {
        Self {
            weights,
            bias,
            calibration,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn calibration(&self) -> PlattScaling {
        self.calibration
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// Signed distance-like score `w . x + b`.
    pub fn decision_function(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn proba(&self, x: &[f64]) -> f64 {
        self.calibration.apply(self.decision_function(x))
    }

    pub fn feature_importance(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.abs()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_blobs_are_fitted_exactly() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let t = f64::from(i) * 0.05;
            rows.push([-2.0 + t, -1.5 - t]);
            labels.push(0);
            rows.push([2.0 - t, 1.5 + t]);
            labels.push(1);
        }
        let data = Dataset::from_rows(&rows, &labels).unwrap();
        let model = train_linear_svm(&data, 1.0, 20, 3).unwrap();
        for (x, &y) in data.rows().zip(data.labels()) {
            assert_eq!(u8::from(model.proba(x) >= 0.5), y);
        }
    }

    #[test]
    fn symmetric_pair_has_boundary_at_origin() {
        let data = Dataset::from_rows(&[[-1.0], [1.0]], &[0, 1]).unwrap();
        let model = train_linear_svm(&data, 1.0, 20, 0).unwrap();
        let boundary = -model.bias() / model.weights()[0];
        assert!(boundary.abs() < 0.1, "boundary {boundary}");
        assert!((model.proba(&[0.0]) - 0.5).abs() < 0.05);
    }

    #[test]
    fn single_class_is_rejected() {
        let data = Dataset::from_rows(&[[-1.0], [1.0]], &[1, 1]).unwrap();
        assert_eq!(
            train_linear_svm(&data, 1.0, 20, 0).unwrap_err(),
            Error::SingleClass
        );
    }

    #[test]
    fn importance_is_absolute_weight() {
        let model = LinearSvm::from_parts(
            vec![2.0, -1.0],
            0.0,
            PlattScaling {
                slope: 1.0,
                intercept: 0.0,
            },
        );
        assert_eq!(model.feature_importance(), vec![2.0, 1.0]);
    }

    #[test]
    fn platt_recovers_logistic_data() {
        // Scores with empirical positive rates close to sigmoid(2s - 1).
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        for k in -20..=20 {
            let s = f64::from(k) / 10.0;
            let p = sigmoid(2.0 * s - 1.0);
            let pos = libm::round(p * 200.0) as usize;
            for j in 0..200 {
                scores.push(s);
                labels.push(u8::from(j < pos));
            }
        }
        let fit = PlattScaling::fit(&scores, &labels);
        assert!((fit.slope - 2.0).abs() < 0.05, "{fit:?}");
        assert!((fit.intercept + 1.0).abs() < 0.05, "{fit:?}");
    }
}
