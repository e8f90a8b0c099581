//! Command-line surface. Flags override values from `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use diabetes_core::ModelKind;

use crate::commands;
use crate::config::RunConfig;
use crate::error::{AppError, AppResult};

#[derive(Debug, Parser)]
#[command(
    name = "diabetes-ml",
    version,
    about = "Diabetes risk classifiers and a weighted soft-voting ensemble"
)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for splits, folds, models and weight search.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Impute with means over the whole dataset instead of the training
    /// rows only.
    #[arg(long, global = true)]
    pub paper_faithful: bool,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct SourceArgs {
    /// Single-table CSV with a header row.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, requires = "demographics")]
    pub vitals: Option<PathBuf>,
    #[arg(long, global = true, requires = "vitals")]
    pub demographics: Option<PathBuf>,
    /// Generate this many synthetic patients.
    #[arg(long, global = true, value_name = "N")]
    pub synthetic: Option<usize>,
    #[arg(long, global = true)]
    pub label: Option<String>,
    /// Columns where 0 means "not recorded" (comma-separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub zero_missing: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub test_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub folds: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split, impute and standardize the input; write the processed splits.
    Prepare,
    /// Train one classifier and score it on the test split.
    Train {
        #[arg(value_parser = parse_kind)]
        kind: ModelKind,
        /// Hyperparameter override, e.g. `--set knn_k=41`.
        #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_assignment)]
        set: Vec<(String, String)>,
        /// Start from the configuration chosen by `cv`.
        #[arg(long)]
        use_cv: bool,
    },
    /// Cross-validated grid search for one classifier.
    Cv {
        #[arg(value_parser = parse_kind)]
        kind: ModelKind,
        /// Sweep, e.g. `--sweep knn_k=1..60` or `--sweep tree_max_depth=3,5,7`.
        #[arg(long = "sweep", value_name = "NAME=VALUES", value_parser = parse_assignment)]
        sweep: Vec<(String, String)>,
        #[arg(long)]
        objective: Option<String>,
    },
    /// Select members, fit voting weights and score the ensemble.
    Ensemble {
        /// CSV with `member` and `weight` columns to use instead of fitting.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Model kinds never used as members (comma-separated).
        #[arg(long, value_delimiter = ',')]
        exclude: Option<Vec<String>>,
        #[arg(long)]
        members: Option<usize>,
    },
    /// Summary table of the latest results.
    Report,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: diabetes_core::Error| e.to_string())
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, found `{s}`"))?;
    Ok((name.trim().to_string(), value.trim().to_string()))
}

impl Cli {
    /// The config file (if any) with command-line overrides applied.
    pub fn resolve_config(&self) -> AppResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        cfg.paper_faithful |= self.paper_faithful;
        let s = &self.source;
        if s.input.is_some() || s.vitals.is_some() || s.synthetic.is_some() {
            cfg.input = s.input.clone();
            cfg.vitals = s.vitals.clone();
            cfg.demographics = s.demographics.clone();
            cfg.synthetic_patients = s.synthetic;
        }
        if let Some(label) = &s.label {
            cfg.label = label.clone();
        }
        if let Some(cols) = &s.zero_missing {
            cfg.zero_missing = cols.clone();
        }
        if let Some(f) = s.test_fraction {
            cfg.test_fraction = f;
        }
        if let Some(k) = s.folds {
            cfg.folds = k;
        }
        match &self.command {
            Command::Cv {
                objective: Some(o), ..
            } => cfg.objective = o.clone(),
            Command::Ensemble {
                exclude, members, ..
            } => {
                if let Some(e) = exclude {
                    cfg.ensemble.exclude = e.clone();
                }
                if let Some(m) = members {
                    cfg.ensemble.members = *m;
                }
            }
            _ => {}
        }
        Ok(cfg)
    }

    pub fn run(&self) -> AppResult<String> {
        let cfg = self.resolve_config()?;
        match &self.command {
            Command::Prepare => commands::prepare(&cfg),
            Command::Train { kind, set, use_cv } => commands::train(&cfg, *kind, set, *use_cv),
            Command::Cv { kind, sweep, .. } => {
                if let Some((name, _)) = sweep.iter().find(|(_, v)| v.is_empty()) {
                    return Err(AppError::Usage(format!("sweep `{name}` has no values")));
                }
                commands::cv(&cfg, *kind, sweep)
            }
            Command::Ensemble { weights, .. } => commands::ensemble(&cfg, weights.as_deref()),
            Command::Report => commands::report(&cfg),
        }
    }
}
