use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{label_targets, normalized, positive_fraction, Criterion, Grower, Tree};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Features considered at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FeatureSampling {
    /// `ceil(sqrt(d))` features drawn without replacement per node.
    #[default]
    Sqrt,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestOptions {
    /// Train each tree on `n` draws with replacement; otherwise on the
    /// training set as-is.
    pub bootstrap: bool,
    pub features: FeatureSampling,
}

impl Default for ForestOptions {
    fn default() -> Self {
        Self {
            bootstrap: true,
            features: FeatureSampling::Sqrt,
        }
    }
}

/// Bagged CART trees; the forest probability is the mean leaf probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<Tree>,
    n_features: usize,
}

pub fn train_random_forest(
    train: &Dataset,
    n_trees: usize,
    max_depth: usize,
    seed: u64,
) -> Result<RandomForest> {
    train_random_forest_with(train, n_trees, max_depth, seed, ForestOptions::default())
}

pub fn train_random_forest_with(
    train: &Dataset,
    n_trees: usize,
    max_depth: usize,
    seed: u64,
    options: ForestOptions,
) -> Result<RandomForest> {
    match train.n_rows() {
        0 => return Err(Error::NoDataRows),
        1 => {
            return Err(Error::TooFewRows {
                needed: 2,
                found: 1,
            })
        }
        _ => {}
    }
    if n_trees == 0 {
        return Err(Error::invalid("forest_n_trees", "must be at least 1"));
    }
    if max_depth == 0 {
        return Err(Error::invalid("forest_max_depth", "must be at least 1"));
    }
    let n = train.n_rows();
    let d = train.n_features();
    let targets = label_targets(train);
    let max_features = match options.features {
        FeatureSampling::Sqrt => Some(libm::ceil(libm::sqrt(d as f64)) as usize),
        FeatureSampling::All => None,
    };
    let grower = Grower {
        data: train,
        targets: &targets,
        criterion: Criterion::Gini,
        max_depth,
        max_features,
    };

    // One independent stream per tree keeps the forest identical however the
    // trees are scheduled.
    let trees = (0..n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let rows: Vec<usize> = if options.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grower.grow(rows, Some(&mut rng), &mut positive_fraction(&targets))
        })
        .collect();
    Ok(RandomForest {
        trees,
        n_features: d,
    })
}

impl RandomForest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn proba(&self, x: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        (total / self.trees.len() as f64).clamp(0.0, 1.0)
    }

    /// Mean of the per-tree normalized impurity decreases, renormalized.
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for tree in &self.trees {
            for (a, v) in acc.iter_mut().zip(normalized(tree.impurity_decrease())) {
                *a += v;
            }
        }
        normalized(&acc)
    }
}
