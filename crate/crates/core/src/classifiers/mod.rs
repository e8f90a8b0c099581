//! The seven classifiers behind a common [`TrainedModel`] facade.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::DEFAULT_THRESHOLD;

pub mod boosting;
pub mod forest;
pub mod knn;
pub mod mlp;
pub mod naive_bayes;
pub mod svm;
pub mod tree;

pub use boosting::{train_gradient_boosting, GradientBoosting};
pub use forest::{train_random_forest, ForestOptions, RandomForest};
pub use knn::{train_knn, Knn};
pub use mlp::{train_mlp, Mlp, MlpConfig};
pub use naive_bayes::{train_gaussian_nb, GaussianNb};
pub use svm::{train_linear_svm, LinearSvm};
pub use tree::{train_decision_tree, DecisionTree};

/// Anything that maps a feature vector to a probability of class 1.
pub trait Classifier {
    fn n_features(&self) -> usize;

    /// Probability of class 1. `x` must have `n_features()` entries.
    fn proba_unchecked(&self, x: &[f64]) -> f64;

    fn threshold(&self) -> f64 {
        DEFAULT_THRESHOLD
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        Ok(self.proba_unchecked(x))
    }

    /// Label 1 iff the probability reaches the threshold.
    fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_proba(x)? >= self.threshold()))
    }

    /// Probabilities for every row of `data`, in row order.
    fn predict_proba_batch(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: data.n_features(),
            });
        }
        Ok(data.rows().map(|x| self.proba_unchecked(x)).collect())
    }

    fn predict_batch(&self, data: &Dataset) -> Result<Vec<u8>> {
        let t = self.threshold();
        Ok(self
            .predict_proba_batch(data)?
            .into_iter()
            .map(|p| u8::from(p >= t))
            .collect())
    }
}

/// Something that can be fitted to a dataset.
pub trait Learner {
    type Model: Classifier;

    fn fit(&self, train: &Dataset) -> Result<Self::Model>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Knn,
    LinearSvm,
    DecisionTree,
    RandomForest,
    GradientBoosting,
    NeuralNetwork,
    NaiveBayes,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Knn,
        ModelKind::LinearSvm,
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
        ModelKind::GradientBoosting,
        ModelKind::NeuralNetwork,
        ModelKind::NaiveBayes,
    ];

    /// Identifier used on the command line and in artifacts.
    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::LinearSvm => "svm",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
            ModelKind::GradientBoosting => "gradient_boosting",
            ModelKind::NeuralNetwork => "neural_network",
            ModelKind::NaiveBayes => "naive_bayes",
        }
    }

    /// Human-readable name used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            ModelKind::Knn => "K-NN",
            ModelKind::LinearSvm => "SVM",
            ModelKind::DecisionTree => "Decision Tree",
            ModelKind::RandomForest => "Random Forest",
            ModelKind::GradientBoosting => "Gradient Boosting",
            ModelKind::NeuralNetwork => "Neural Network",
            ModelKind::NaiveBayes => "Naive Bayes",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match key.as_str() {
            "knn" | "k_nn" | "kneighbors" => ModelKind::Knn,
            "svm" | "linear_svm" => ModelKind::LinearSvm,
            "decision_tree" | "tree" | "dt" => ModelKind::DecisionTree,
            "random_forest" | "forest" | "rf" => ModelKind::RandomForest,
            "gradient_boosting" | "boosting" | "gb" | "gbm" => ModelKind::GradientBoosting,
            "neural_network" | "mlp" | "nn" => ModelKind::NeuralNetwork,
            "naive_bayes" | "nb" | "gaussian_nb" => ModelKind::NaiveBayes,
            _ => return Err(Error::UnknownModelKind(s.to_string())),
        })
    }
}

/// Hyperparameters for every model kind; each kind reads its own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperParams {
    pub knn_k: usize,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub tree_max_depth: usize,
    pub forest_max_depth: usize,
    pub forest_n_trees: usize,
    pub gb_max_depth: usize,
    pub gb_n_stages: usize,
    pub gb_learning_rate: f64,
    pub mlp_hidden_sizes: Vec<usize>,
    pub mlp_learning_rate: f64,
    pub mlp_epochs: usize,
    pub mlp_momentum: f64,
    pub mlp_batch_size: usize,
    pub nb_var_floor: f64,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            knn_k: 41,
            svm_c: 1.0,
            svm_epochs: 20,
            tree_max_depth: 7,
            forest_max_depth: 9,
            forest_n_trees: 250,
            gb_max_depth: 3,
            gb_n_stages: 100,
            gb_learning_rate: 0.1,
            mlp_hidden_sizes: vec![32],
            mlp_learning_rate: 0.01,
            mlp_epochs: 200,
            mlp_momentum: 0.9,
            mlp_batch_size: 32,
            nb_var_floor: 1e-9,
            seed: 0,
        }
    }
}

impl HyperParams {
    /// Sets one field from its name and textual value, e.g. `("knn_k", "41")`.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(name: &'static str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(name, alloc::format!("cannot parse `{value}`")))
        }
        match name.trim() {
            "knn_k" | "k" => self.knn_k = parse("knn_k", value)?,
            "svm_c" | "c" => self.svm_c = parse("svm_c", value)?,
            "svm_epochs" => self.svm_epochs = parse("svm_epochs", value)?,
            "tree_max_depth" => self.tree_max_depth = parse("tree_max_depth", value)?,
            "forest_max_depth" => self.forest_max_depth = parse("forest_max_depth", value)?,
            "forest_n_trees" | "n_trees" => self.forest_n_trees = parse("forest_n_trees", value)?,
            "gb_max_depth" => self.gb_max_depth = parse("gb_max_depth", value)?,
            "gb_n_stages" | "n_stages" => self.gb_n_stages = parse("gb_n_stages", value)?,
            "gb_learning_rate" => self.gb_learning_rate = parse("gb_learning_rate", value)?,
            "mlp_hidden_sizes" => {
                self.mlp_hidden_sizes = value
                    .split(['x', ';', '/'])
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse("mlp_hidden_sizes", s))
                    .collect::<Result<_>>()?;
            }
            "mlp_learning_rate" => self.mlp_learning_rate = parse("mlp_learning_rate", value)?,
            "mlp_epochs" => self.mlp_epochs = parse("mlp_epochs", value)?,
            "mlp_momentum" => self.mlp_momentum = parse("mlp_momentum", value)?,
            "mlp_batch_size" => self.mlp_batch_size = parse("mlp_batch_size", value)?,
            "nb_var_floor" => self.nb_var_floor = parse("nb_var_floor", value)?,
            "seed" => self.seed = parse("seed", value)?,
            _ => {
                return Err(Error::invalid(
                    "hyperparameter",
                    alloc::format!("unknown name `{name}`"),
                ))
            }
        }
        Ok(())
    }

    /// Textual value of a field, the inverse of [`HyperParams::set`].
    pub fn get(&self, name: &str) -> Option<String> {
        use alloc::format;
        Some(match name.trim() {
            "knn_k" | "k" => format!("{}", self.knn_k),
            "svm_c" | "c" => format!("{}", self.svm_c),
            "svm_epochs" => format!("{}", self.svm_epochs),
            "tree_max_depth" => format!("{}", self.tree_max_depth),
            "forest_max_depth" => format!("{}", self.forest_max_depth),
            "forest_n_trees" | "n_trees" => format!("{}", self.forest_n_trees),
            "gb_max_depth" => format!("{}", self.gb_max_depth),
            "gb_n_stages" | "n_stages" => format!("{}", self.gb_n_stages),
            "gb_learning_rate" => format!("{}", self.gb_learning_rate),
            "mlp_hidden_sizes" => {
                let parts: Vec<String> = self
                    .mlp_hidden_sizes
                    .iter()
                    .map(|h| format!("{h}"))
                    .collect();
                parts.join("x")
            }
            "mlp_learning_rate" => format!("{}", self.mlp_learning_rate),
            "mlp_epochs" => format!("{}", self.mlp_epochs),
            "mlp_momentum" => format!("{}", self.mlp_momentum),
            "mlp_batch_size" => format!("{}", self.mlp_batch_size),
            "nb_var_floor" => format!("{}", self.nb_var_floor),
            "seed" => format!("{}", self.seed),
            _ => return None,
        })
    }

    /// The hyperparameters that `kind` actually reads.
    pub fn relevant_names(kind: ModelKind) -> &'static [&'static str] {
        match kind {
            ModelKind::Knn => &["knn_k"],
            ModelKind::LinearSvm => &["svm_c", "svm_epochs", "seed"],
            ModelKind::DecisionTree => &["tree_max_depth"],
            ModelKind::RandomForest => &["forest_n_trees", "forest_max_depth", "seed"],
            ModelKind::GradientBoosting => &["gb_n_stages", "gb_max_depth", "gb_learning_rate"],
            ModelKind::NeuralNetwork => &[
                "mlp_hidden_sizes",
                "mlp_learning_rate",
                "mlp_epochs",
                "mlp_momentum",
                "mlp_batch_size",
                "seed",
            ],
            ModelKind::NaiveBayes => &["nb_var_floor"],
        }
    }

    pub fn mlp_config(&self) -> MlpConfig {
        MlpConfig {
            hidden_sizes: self.mlp_hidden_sizes.clone(),
            learning_rate: self.mlp_learning_rate,
            epochs: self.mlp_epochs,
            momentum: self.mlp_momentum,
            batch_size: self.mlp_batch_size,
            seed: self.seed,
        }
    }
}

/// A model kind together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: HyperParams,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, params: HyperParams) -> Self {
        Self { kind, params }
    }

    pub fn with_defaults(kind: ModelKind) -> Self {
        Self::new(kind, HyperParams::default())
    }
}

impl Learner for ModelSpec {
    type Model = TrainedModel;

    fn fit(&self, train: &Dataset) -> Result<TrainedModel> {
        let p = &self.params;
        let model = match self.kind {
            ModelKind::Knn => Model::Knn(train_knn(train, p.knn_k)?),
            ModelKind::LinearSvm => {
                Model::LinearSvm(train_linear_svm(train, p.svm_c, p.svm_epochs, p.seed)?)
            }
            ModelKind::DecisionTree => {
                Model::DecisionTree(train_decision_tree(train, p.tree_max_depth)?)
            }
            ModelKind::RandomForest => Model::RandomForest(train_random_forest(
                train,
                p.forest_n_trees,
                p.forest_max_depth,
                p.seed,
            )?),
            ModelKind::GradientBoosting => Model::GradientBoosting(train_gradient_boosting(
                train,
                p.gb_n_stages,
                p.gb_max_depth,
                p.gb_learning_rate,
            )?),
            ModelKind::NeuralNetwork => Model::NeuralNetwork(train_mlp(train, &p.mlp_config())?),
            ModelKind::NaiveBayes => Model::NaiveBayes(train_gaussian_nb(train, p.nb_var_floor)?),
        };
        Ok(TrainedModel::new(model))
    }
}

/// Fitted state of one of the seven algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum Model {
    Knn(Knn),
    LinearSvm(LinearSvm),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    GradientBoosting(GradientBoosting),
    NeuralNetwork(Mlp),
    NaiveBayes(GaussianNb),
}

/// A fitted classifier with its decision threshold. Immutable after fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    model: Model,
    feature_count: usize,
    threshold: f64,
}

impl TrainedModel {
    pub fn new(model: Model) -> Self {
        let feature_count = match &model {
            Model::Knn(m) => m.n_features(),
            Model::LinearSvm(m) => m.n_features(),
            Model::DecisionTree(m) => m.n_features,
            Model::RandomForest(m) => m.n_features(),
            Model::GradientBoosting(m) => m.n_features(),
            Model::NeuralNetwork(m) => m.n_features(),
            Model::NaiveBayes(m) => m.n_features(),
        };
        Self {
            model,
            feature_count,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::invalid("threshold", "must lie in [0, 1]"));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::Knn(_) => ModelKind::Knn,
            Model::LinearSvm(_) => ModelKind::LinearSvm,
            Model::DecisionTree(_) => ModelKind::DecisionTree,
            Model::RandomForest(_) => ModelKind::RandomForest,
            Model::GradientBoosting(_) => ModelKind::GradientBoosting,
            Model::NeuralNetwork(_) => ModelKind::NeuralNetwork,
            Model::NaiveBayes(_) => ModelKind::NaiveBayes,
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Per-feature importance scores.
    ///
    /// Linear SVM: absolute hyperplane weight. Tree models: impurity decrease
    /// credited to each feature, normalized to sum to one.
    pub fn feature_importance(&self) -> Result<Vec<f64>> {
        match &self.model {
            Model::LinearSvm(m) => Ok(m.feature_importance()),
            Model::DecisionTree(m) => Ok(m.feature_importance()),
            Model::RandomForest(m) => Ok(m.feature_importance()),
            Model::GradientBoosting(m) => Ok(m.feature_importance()),
            Model::Knn(_) | Model::NeuralNetwork(_) | Model::NaiveBayes(_) => {
                Err(Error::Unsupported {
                    kind: self.kind().key(),
                    operation: "feature importance",
                })
            }
        }
    }
}

impl Classifier for TrainedModel {
    fn n_features(&self) -> usize {
        self.feature_count
    }

    fn proba_unchecked(&self, x: &[f64]) -> f64 {
        let p = match &self.model {
            Model::Knn(m) => m.proba(x),
            Model::LinearSvm(m) => m.proba(x),
            Model::DecisionTree(m) => m.proba(x),
            Model::RandomForest(m) => m.proba(x),
            Model::GradientBoosting(m) => m.proba(x),
            Model::NeuralNetwork(m) => m.proba(x),
            Model::NaiveBayes(m) => m.proba(x),
        };
        // NaN can only come from non-finite inputs; map it to even odds
        // rather than leak it into metrics.
        if p.is_nan() {
            0.5
        } else {
            p.clamp(0.0, 1.0)
        }
    }

    fn threshold(&self) -> f64 {
        self.threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::from_rows(
            &[
                [0.0, 1.0],
                [1.0, 0.5],
                [2.0, 0.0],
                [3.0, 1.5],
                [4.0, 2.0],
                [5.0, 2.5],
                [6.0, 1.0],
                [7.0, 0.0],
            ],
            &[0, 0, 0, 1, 0, 1, 1, 1],
        )
        .unwrap()
    }

    fn small_params() -> HyperParams {
        HyperParams {
            knn_k: 3,
            forest_n_trees: 10,
            gb_n_stages: 10,
            mlp_epochs: 20,
            ..HyperParams::default()
        }
    }

    #[test]
    fn every_kind_trains_and_predicts() {
        let data = toy();
        for kind in ModelKind::ALL {
            let model = ModelSpec::new(kind, small_params()).fit(&data).unwrap();
            assert_eq!(model.kind(), kind);
            let probs = model.predict_proba_batch(&data).unwrap();
            assert!(
                probs.iter().all(|p| (0.0..=1.0).contains(p)),
                "{kind}: {probs:?}"
            );
            assert!(matches!(
                model.predict_proba(&[1.0]),
                Err(Error::DimensionMismatch { .. })
            ));
        }
    }

    #[test]
    fn threshold_tie_goes_to_positive_class() {
        // A stump whose leaves hold 0.5 and 0.7.
        let data = Dataset::from_rows(
            &[
                [0.0],
                [0.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
                [1.0],
            ],
            &[0, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 1],
        )
        .unwrap();
        let model = ModelSpec::new(
            ModelKind::DecisionTree,
            HyperParams {
                tree_max_depth: 1,
                ..Default::default()
            },
        )
        .fit(&data)
        .unwrap();
        assert_eq!(model.predict_proba(&[0.0]).unwrap(), 0.5);
        assert_eq!(model.predict(&[0.0]).unwrap(), 1);
        assert_eq!(model.predict_proba(&[1.0]).unwrap(), 0.7);
        assert_eq!(model.predict(&[1.0]).unwrap(), 1);
        let strict = model.with_threshold(0.75).unwrap();
        assert_eq!(strict.predict(&[1.0]).unwrap(), 0);
    }

    #[test]
    fn importance_only_for_supported_kinds() {
        let data = toy();
        for kind in ModelKind::ALL {
            let model = ModelSpec::new(kind, small_params()).fit(&data).unwrap();
            let supported = matches!(
                kind,
                ModelKind::LinearSvm
                    | ModelKind::DecisionTree
                    | ModelKind::RandomForest
                    | ModelKind::GradientBoosting
            );
            assert_eq!(model.feature_importance().is_ok(), supported, "{kind}");
        }
    }

    #[test]
    fn kinds_parse_from_keys_and_aliases() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.key().parse::<ModelKind>().unwrap(), kind);
        }
        assert_eq!(
            "MLP".parse::<ModelKind>().unwrap(),
            ModelKind::NeuralNetwork
        );
        assert!(matches!(
            "lasso".parse::<ModelKind>(),
            Err(Error::UnknownModelKind(_))
        ));
    }

    #[test]
    fn hyperparams_set_and_get() {
        let mut p = HyperParams::default();
        p.set("knn_k", "7").unwrap();
        p.set("mlp_hidden_sizes", "16x8").unwrap();
        assert_eq!(p.knn_k, 7);
        assert_eq!(p.mlp_hidden_sizes, vec![16, 8]);
        assert_eq!(p.get("mlp_hidden_sizes").unwrap(), "16x8");
        assert!(p.set("knn_k", "seven").is_err());
        assert!(p.set("bogus", "1").is_err());
    }
}
