use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Brute-force k-nearest-neighbours over Euclidean distance with an
/// unweighted vote. Equal distances are resolved in favour of the lower
/// training row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    k: usize,
    train: Dataset,
}

pub fn train_knn(train: &Dataset, k: usize) -> Result<Knn> {
    if k < 1 || k > train.n_rows() {
        return Err(Error::invalid(
            "k",
            alloc::format!("must lie in 1..={}, got {k}", train.n_rows()),
        ));
    }
    Ok(Knn {
        k,
        train: train.clone(),
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Knn {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_features(&self) -> usize {
        self.train.n_features()
    }

    /// Training row indices of the `k` nearest neighbours of `x`, nearest first.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .train
            .rows()
            .enumerate()
            .map(|(i, row)| (squared_distance(row, x), i))
            .collect();
        let by_distance =
            |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_distance);
            dist.truncate(self.k);
        }
        dist.sort_unstable_by(by_distance);
        dist.into_iter().map(|(_, i)| i).collect()
    }

    /// Fraction of the `k` nearest neighbours labelled 1.
    pub fn proba(&self, x: &[f64]) -> f64 {
        let labels = self.train.labels();
        let positives = self
            .neighbors(x)
            .into_iter()
            .filter(|&i| labels[i] == 1)
            .count();
        positives as f64 / self.k as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_neighbour_vote() {
        let data = Dataset::from_rows(&[[0.0, 0.0], [1.0, 1.0]], &[0, 1]).unwrap();
        let model = train_knn(&data, 1).unwrap();
        assert_eq!(model.proba(&[0.1, 0.1]), 0.0);
        assert_eq!(model.proba(&[0.9, 0.8]), 1.0);
    }

    #[test]
    fn three_neighbours_two_positive() {
        let data = Dataset::from_rows(&[[0.0], [1.0], [2.0], [10.0]], &[1, 1, 0, 0]).unwrap();
        let model = train_knn(&data, 3).unwrap();
        assert!((model.proba(&[1.0]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ties_prefer_lower_row_index() {
        let data = Dataset::from_rows(&[[-1.0], [1.0], [1.0]], &[0, 1, 0]).unwrap();
        let model = train_knn(&data, 1).unwrap();
        assert_eq!(model.neighbors(&[0.0]), alloc::vec![0]);
        assert_eq!(model.neighbors(&[1.0]), alloc::vec![1]);
    }

    #[test]
    fn k_must_fit_training_set() {
        let data = Dataset::from_rows(&[[0.0], [1.0]], &[0, 1]).unwrap();
        assert!(train_knn(&data, 0).is_err());
        assert!(train_knn(&data, 3).is_err());
        assert!(train_knn(&data, 2).is_ok());
    }
}
