//! CART trees: greedy binary splits on `(feature, threshold)` pairs, with
//! thresholds at midpoints between consecutive distinct values.
//!
//! The same grower serves classification (Gini impurity on 0/1 targets),
//! and the regression trees used by gradient boosting (sum of squared
//! errors). Among equally good splits the first one found wins: lowest
//! feature index, then lowest threshold.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Criterion {
    Gini,
    Variance,
}

impl Criterion {
    /// Node cost, scaled by node size: `n * gini` or the SSE.
    fn cost(self, n: f64, sum: f64, sum_sq: f64) -> f64 {
        match self {
            Criterion::Gini => 2.0 * sum * (n - sum) / n,
            Criterion::Variance => (sum_sq - sum * sum / n).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
    /// Total cost decrease credited to each feature.
    impurity_decrease: Vec<f64>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Feature and threshold of the root split, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes[0] {
            Node::Split {
                feature, threshold, ..
            } => Some((feature, threshold)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn impurity_decrease(&self) -> &[f64] {
        &self.impurity_decrease
    }

    pub(crate) fn leaf_values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.nodes.iter_mut().filter_map(|n| match n {
            Node::Leaf { value } => Some(value),
            Node::Split { .. } => None,
        })
    }
}

/// Importances normalized to sum to one (all zero for a single-leaf tree).
pub(crate) fn normalized(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![0.0; raw.len()]
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

pub(crate) struct Grower<'a> {
    pub data: &'a Dataset,
    pub targets: &'a [f64],
    pub criterion: Criterion,
    pub max_depth: usize,
    /// Features examined per node; `None` examines all of them.
    pub max_features: Option<usize>,
}

impl Grower<'_> {
    /// Grows a tree over `indices` (duplicates allowed, as in bootstrap
    /// samples). `leaf_value` maps the rows reaching a leaf to its output.
    pub fn grow(
        &self,
        indices: Vec<usize>,
        rng: Option<&mut ChaCha8Rng>,
        leaf_value: &mut dyn FnMut(&[usize]) -> f64,
    ) -> Tree {
        let mut tree = Tree {
            nodes: Vec::new(),
            impurity_decrease: vec![0.0; self.data.n_features()],
        };
        let mut rng = rng;
        self.grow_node(&mut tree, indices, 0, &mut rng, leaf_value);
        tree
    }

    fn grow_node(
        &self,
        tree: &mut Tree,
        indices: Vec<usize>,
        depth: usize,
        rng: &mut Option<&mut ChaCha8Rng>,
        leaf_value: &mut dyn FnMut(&[usize]) -> f64,
    ) -> usize {
        let at = tree.nodes.len();
        tree.nodes.push(Node::Leaf { value: 0.0 });

        let split = if depth < self.max_depth && indices.len() >= 2 {
            self.best_split(&indices, rng)
        } else {
            None
        };
        let Some(best) = split else {
            tree.nodes[at] = Node::Leaf {
                value: leaf_value(&indices),
            };
            return at;
        };

        tree.impurity_decrease[best.feature] += best.gain;
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.data.value(i, best.feature) <= best.threshold);
        drop(indices);
        let left = self.grow_node(tree, left_rows, depth + 1, rng, leaf_value);
        let right = self.grow_node(tree, right_rows, depth + 1, rng, leaf_value);
        tree.nodes[at] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        at
    }

    fn best_split(
        &self,
        indices: &[usize],
        rng: &mut Option<&mut ChaCha8Rng>,
    ) -> Option<Candidate> {
        let d = self.data.n_features();
        let features: Vec<usize> = match (self.max_features, rng.as_deref_mut()) {
            (Some(k), Some(rng)) if k < d => {
                let mut f = index::sample(rng, d, k).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        };

        let n = indices.len() as f64;
        let (sum, sum_sq) = indices.iter().fold((0.0, 0.0), |(s, q), &i| {
            let t = self.targets[i];
            (s + t, q + t * t)
        });
        let parent = self.criterion.cost(n, sum, sum_sq);
        if parent <= 0.0 {
            return None;
        }
        // Gains closer than this are treated as ties, so rounding noise cannot
        // reorder mathematically equal candidates.
        let tie = 1e-12 * parent.max(1e-300);

        let mut best: Option<Candidate> = None;
        let mut order = indices.to_vec();
        for &f in &features {
            order.sort_by(|&a, &b| {
                self.data
                    .value(a, f)
                    .total_cmp(&self.data.value(b, f))
                    .then(a.cmp(&b))
            });
            let (mut ls, mut lq) = (0.0, 0.0);
            for k in 0..order.len() - 1 {
                let t = self.targets[order[k]];
                ls += t;
                lq += t * t;
                let lo = self.data.value(order[k], f);
                let hi = self.data.value(order[k + 1], f);
                if !(lo < hi) {
                    continue;
                }
                let nl = (k + 1) as f64;
                let gain = parent
                    - self.criterion.cost(nl, ls, lq)
                    - self.criterion.cost(n - nl, sum - ls, sum_sq - lq);
                if gain > tie && best.as_ref().is_none_or(|b| gain > b.gain + tie) {
                    best = Some(Candidate {
                        feature: f,
                        threshold: midpoint(lo, hi),
                        gain,
                    });
                }
            }
        }
        best
    }
}

/// Midpoint of `lo < hi` that is guaranteed to separate them under `<=`.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) * 0.5;
    if mid >= hi || !mid.is_finite() {
        lo
    } else {
        mid
    }
}

/// A single CART classification tree; leaves hold the positive-class
/// fraction of their training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub(crate) tree: Tree,
    pub(crate) n_features: usize,
}

pub(crate) fn positive_fraction(targets: &[f64]) -> impl FnMut(&[usize]) -> f64 + '_ {
    move |rows: &[usize]| rows.iter().map(|&i| targets[i]).sum::<f64>() / rows.len() as f64
}

pub(crate) fn label_targets(data: &Dataset) -> Vec<f64> {
    data.labels().iter().map(|&l| f64::from(l)).collect()
}

pub fn train_decision_tree(train: &Dataset, max_depth: usize) -> Result<DecisionTree> {
    if train.is_empty() {
        return Err(Error::NoDataRows);
    }
    if max_depth == 0 {
        return Err(Error::invalid("max_depth", "must be at least 1"));
    }
    let targets = label_targets(train);
    let grower = Grower {
        data: train,
        targets: &targets,
        criterion: Criterion::Gini,
        max_depth,
        max_features: None,
    };
    let tree = grower.grow(
        (0..train.n_rows()).collect(),
        None,
        &mut positive_fraction(&targets),
    );
    Ok(DecisionTree {
        tree,
        n_features: train.n_features(),
    })
}

impl DecisionTree {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn proba(&self, x: &[f64]) -> f64 {
        self.tree.predict(x)
    }

    pub fn feature_importance(&self) -> Vec<f64> {
        normalized(self.tree.impurity_decrease())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(xs: &[f64], ys: &[u8]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::from_rows(&rows, ys).unwrap()
    }

    #[test]
    fn stump_splits_at_midpoint() {
        let data = one_d(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1]);
        let model = train_decision_tree(&data, 1).unwrap();
        assert_eq!(model.tree().root_split(), Some((0, 2.5)));
        assert_eq!(model.proba(&[1.5]), 0.0);
        assert_eq!(model.proba(&[3.5]), 1.0);
    }

    #[test]
    fn pure_data_gives_single_leaf() {
        let data = one_d(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        let model = train_decision_tree(&data, 5).unwrap();
        assert_eq!(model.tree().nodes(), &[Node::Leaf { value: 1.0 }]);
    }

    #[test]
    fn xor_is_not_separable_by_a_stump() {
        let data = Dataset::from_rows(
            &[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]],
            &[0, 1, 1, 0],
        )
        .unwrap();
        let model = train_decision_tree(&data, 1).unwrap();
        let correct = data
            .rows()
            .zip(data.labels())
            .filter(|(x, &y)| u8::from(model.proba(x) >= 0.5) == y)
            .count();
        assert_eq!(correct, 2);
    }

    #[test]
    fn depth_limit_is_respected() {
        let xs: Vec<f64> = (0..64).map(f64::from).collect();
        let ys: Vec<u8> = (0..64).map(|i| (i % 2) as u8).collect();
        let model = train_decision_tree(&one_d(&xs, &ys), 3).unwrap();
        assert!(model.tree().depth() <= 3);
        assert!(model.tree().n_leaves() <= 8);
    }

    #[test]
    fn importance_concentrates_on_split_feature() {
        let data = Dataset::from_rows(
            &[
                [5.0, 0.0, 1.0, 0.0],
                [5.0, 0.0, 1.0, 1.0],
                [5.0, 0.0, 1.0, 2.0],
                [5.0, 0.0, 1.0, 3.0],
            ],
            &[0, 0, 1, 1],
        )
        .unwrap();
        let model = train_decision_tree(&data, 4).unwrap();
        assert_eq!(model.feature_importance(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn equally_good_splits_resolve_to_lowest_feature() {
        let data = Dataset::from_rows(
            &[[1.0, 0.0], [2.0, 1.0], [3.0, 2.0], [4.0, 3.0]],
            &[0, 0, 1, 1],
        )
        .unwrap();
        let model = train_decision_tree(&data, 1).unwrap();
        assert_eq!(model.tree().root_split(), Some((0, 2.5)));
    }

    #[test]
    fn midpoint_separates_adjacent_floats() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(lo <= m && m < hi);
    }

    #[test]
    fn rejects_empty_or_zero_depth() {
        let empty = Dataset::new(Vec::new(), Vec::new(), alloc::vec!["x".into()]).unwrap();
        assert_eq!(
            train_decision_tree(&empty, 3).unwrap_err(),
            Error::NoDataRows
        );
        assert!(train_decision_tree(&one_d(&[1.0], &[1]), 0).is_err());
    }
}
