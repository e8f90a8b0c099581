use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math::{self, sigmoid};

/// Gaussian naive Bayes: per-class prior and independent per-feature normal
/// likelihoods, combined in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    log_priors: [f64; 2],
    means: [Vec<f64>; 2],
    variances: [Vec<f64>; 2],
}

/// Fits the model. Every per-class variance is floored at
/// `var_floor * (largest feature variance)` so constant features stay finite.
pub fn train_gaussian_nb(train: &Dataset, var_floor: f64) -> Result<GaussianNb> {
    if !(var_floor > 0.0 && var_floor.is_finite()) {
        return Err(Error::invalid("nb_var_floor", "must be positive"));
    }
    let counts = train.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::SingleClass);
    }
    let d = train.n_features();
    let max_var = (0..d)
        .map(|j| math::population_variance(&train.column(j)))
        .fold(0.0f64, f64::max);
    let floor = var_floor * if max_var > 0.0 { max_var } else { 1.0 };

    let n = train.n_rows() as f64;
    let stats = [0u8, 1].map(|c| {
        let rows: Vec<&[f64]> = train
            .rows()
            .zip(train.labels())
            .filter(|(_, &y)| y == c)
            .map(|(x, _)| x)
            .collect();
        let m = rows.len() as f64;
        let means: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m)
            .collect();
        let variances: Vec<f64> = (0..d)
            .map(|j| {
                let v = rows
                    .iter()
                    .map(|r| (r[j] - means[j]) * (r[j] - means[j]))
                    .sum::<f64>()
                    / m;
                v.max(floor)
            })
            .collect();
        (means, variances)
    });
    let [(m0, v0), (m1, v1)] = stats;
    Ok(GaussianNb {
        log_priors: [
            math::ln(counts[0] as f64 / n),
            math::ln(counts[1] as f64 / n),
        ],
        means: [m0, m1],
        variances: [v0, v1],
    })
}

impl GaussianNb {
    pub fn n_features(&self) -> usize {
        self.means[0].len()
    }

    pub fn means(&self, class: usize) -> &[f64] {
        &self.means[class]
    }

    pub fn variances(&self, class: usize) -> &[f64] {
        &self.variances[class]
    }

    pub fn priors(&self) -> [f64; 2] {
        self.log_priors.map(math::exp)
    }

    /// `ln P(c) + sum_i ln N(x_i; mean_ci, var_ci)` for both classes.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> [f64; 2] {
        [0, 1].map(|c| {
            let ll: f64 = x
                .iter()
                .zip(&self.means[c])
                .zip(&self.variances[c])
                .map(|((&xi, &mu), &var)| {
                    -0.5 * (math::ln(2.0 * core::f64::consts::PI * var)
                        + (xi - mu) * (xi - mu) / var)
                })
                .sum();
            self.log_priors[c] + ll
        })
    }

    /// Normalized posteriors `[P(0 | x), P(1 | x)]`.
    pub fn posteriors(&self, x: &[f64]) -> [f64; 2] {
        let [l0, l1] = self.joint_log_likelihood(x);
        [sigmoid(l0 - l1), sigmoid(l1 - l0)]
    }

    pub fn proba(&self, x: &[f64]) -> f64 {
        let [l0, l1] = self.joint_log_likelihood(x);
        sigmoid(l1 - l0)
    }
}
