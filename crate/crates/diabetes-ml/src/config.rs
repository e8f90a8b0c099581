//! Run configuration: an optional TOML file, overridden by command-line flags.
//!
//! ```toml
//! input = "pima.csv"
//! label = "Outcome"
//! zero_missing = ["Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"]
//! seed = 7
//! out_dir = "runs/pima"
//!
//! [params]
//! knn_k = 41
//!
//! [grid]
//! knn_k = "1..60"
//!
//! [ensemble]
//! exclude = ["naive_bayes"]
//! members = 3
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use diabetes_core::model_selection::{ImputationScope, Objective, DEFAULT_FOLDS};
use diabetes_core::{HyperParams, ModelKind};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    /// Model kinds never considered as members.
    pub exclude: Vec<String>,
    pub members: usize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        Self {
            exclude: vec!["naive_bayes".into()],
            members: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Single-table CSV input.
    pub input: Option<PathBuf>,
    /// Vitals + demographics input pair.
    pub vitals: Option<PathBuf>,
    pub demographics: Option<PathBuf>,
    /// Generate this many synthetic patients instead of reading files.
    pub synthetic_patients: Option<usize>,
    pub label: String,
    pub features: Option<Vec<String>>,
    /// Single-table columns where 0 means "not recorded".
    pub zero_missing: Vec<String>,
    pub test_fraction: f64,
    pub folds: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub paper_faithful: bool,
    pub objective: String,
    pub params: HyperParams,
    /// Hyperparameter sweeps for `cv`, e.g. `knn_k = "1..60"` or
    /// `tree_max_depth = "3,5,7"`.
    pub grid: BTreeMap<String, String>,
    pub ensemble: EnsembleSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            vitals: None,
            demographics: None,
            synthetic_patients: None,
            label: crate::io::PIMA_LABEL.into(),
            features: None,
            zero_missing: Vec::new(),
            test_fraction: 0.25,
            folds: DEFAULT_FOLDS,
            seed: 0,
            out_dir: PathBuf::from("out"),
            paper_faithful: false,
            objective: "accuracy".into(),
            params: HyperParams::default(),
            grid: BTreeMap::new(),
            ensemble: EnsembleSettings::default(),
        }
    }
}

/// Where the raw data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Table(PathBuf),
    Vitals {
        vitals: PathBuf,
        demographics: PathBuf,
    },
    Synthetic(usize),
}

impl RunConfig {
    pub fn from_toml(text: &str) -> AppResult<Self> {
        toml::from_str(text).map_err(|e| AppError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Usage(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(path.display()))
    }

    pub fn source(&self) -> AppResult<SourceSpec> {
        match (
            &self.input,
            &self.vitals,
            &self.demographics,
            self.synthetic_patients,
        ) {
            (Some(p), None, None, None) => Ok(SourceSpec::Table(p.clone())),
            (None, Some(v), Some(d), None) => Ok(SourceSpec::Vitals {
                vitals: v.clone(),
                demographics: d.clone(),
            }),
            (None, None, None, Some(n)) if n >= 1 => Ok(SourceSpec::Synthetic(n)),
            (None, None, None, Some(_)) => Err(AppError::Usage(
                "synthetic patient count must be at least 1".into(),
            )),
            (None, Some(_), None, None) | (None, None, Some(_), None) => Err(AppError::Usage(
                "--vitals and --demographics must be given together".into(),
            )),
            (None, None, None, None) => Err(AppError::Usage(
                "no input: give --input, --vitals with --demographics, or --synthetic".into(),
            )),
            _ => Err(AppError::Usage("give exactly one input source".into())),
        }
    }

    /// Hyperparameters with the run seed applied.
    pub fn hyper_params(&self) -> HyperParams {
        let mut p = self.params.clone();
        p.seed = self.seed;
        p
    }

    pub fn objective(&self) -> AppResult<Objective> {
        Ok(self.objective.parse::<Objective>()?)
    }

    pub fn imputation(&self) -> ImputationScope {
        if self.paper_faithful {
            ImputationScope::WholeDataset
        } else {
            ImputationScope::TrainingFold
        }
    }

    pub fn excluded_kinds(&self) -> AppResult<Vec<ModelKind>> {
        self.ensemble
            .exclude
            .iter()
            .map(|s| Ok(s.parse::<ModelKind>()?))
            .collect()
    }

    pub fn validate(&self) -> AppResult<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(AppError::Usage(
                "test_fraction must lie strictly between 0 and 1".into(),
            ));
        }
        if self.folds < 2 {
            return Err(AppError::Usage("folds must be at least 2".into()));
        }
        if self.ensemble.members == 0 {
            return Err(AppError::Usage(
                "ensemble members must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Values of one swept hyperparameter: `a..b` (inclusive integer range) or
/// a comma-separated list.
pub fn parse_sweep_values(spec: &str) -> AppResult<Vec<String>> {
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| AppError::Usage(format!("bad range bound `{s}` in `{spec}`")))
        };
        let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
        return Ok((lo..=hi).map(|v| v.to_string()).collect());
    }
    Ok(spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

/// Cartesian product of the sweeps over `base`, first sweep varying
/// slowest. No sweeps gives the single configuration `base`.
pub fn expand_grid(
    base: &HyperParams,
    sweeps: &[(String, Vec<String>)],
) -> AppResult<Vec<HyperParams>> {
    let mut grid = vec![base.clone()];
    for (name, values) in sweeps {
        let mut next = Vec::with_capacity(grid.len() * values.len());
        for params in &grid {
            for v in values {
                let mut p = params.clone();
                p.set(name, v)?;
                next.push(p);
            }
        }
        grid = next;
    }
    Ok(grid)
}
