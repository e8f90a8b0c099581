//! The five pipeline steps. Each returns the text it wants shown to the user
//! and writes its artifacts under the output directory:
//!
//! ```text
//! raw/          synthetic input tables (synthetic runs only)
//! prepared/     train.csv, test.csv, prepare.json
//! models/       <kind>.json, <kind>_importance.csv
//! cv/           <kind>.csv, <kind>_curve_<param>.csv, <kind>_best.json
//! ensemble/     ensemble.json, weights.csv
//! reports/      classifiers.csv, ensemble.csv, summary.csv, summary.txt
//! ```
//!
//! Concurrent runs against the same output directory are not supported.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use diabetes_core::classifiers::{Classifier, Learner};
use diabetes_core::dataset::{train_test_split_masked, zeros_to_missing, Preprocessor};
use diabetes_core::ensemble::{
    ensemble_log_loss, evaluate, optimize_weights_from_probas, select_members, WeightSearchOptions,
};
use diabetes_core::metrics::{log_loss, Metric, LOG_LOSS_EPSILON};
use diabetes_core::model_selection::{cross_validate, error_curve, grid_search, CvOptions};
use diabetes_core::synthetic::generate_synthetic_vitals;
use diabetes_core::vitals::{aggregate_vitals, to_dataset};
use diabetes_core::{Dataset, EnsembleModel, HyperParams, MaskedDataset, ModelKind, ModelSpec};

use crate::artifacts::{
    read_json, write_json, CvBest, EnsembleArtifact, ModelArtifact, PrepareRecord, SCHEMA_VERSION,
};
use crate::config::{expand_grid, parse_sweep_values, RunConfig, SourceSpec};
use crate::error::{AppError, AppResult, Context};
use crate::io::{self, TableSchema};
use crate::report::{self, ReportRow};

/// Label column name used for vitals-derived datasets.
pub const VITALS_LABEL: &str = "label";
pub const ENSEMBLE_ROW: &str = "Ensemble";

/// File locations inside an output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn raw_vitals(&self) -> PathBuf {
        self.root.join("raw/vitals.csv")
    }

    pub fn raw_demographics(&self) -> PathBuf {
        self.root.join("raw/demographics.csv")
    }

    pub fn train_csv(&self) -> PathBuf {
        self.root.join("prepared/train.csv")
    }

    pub fn test_csv(&self) -> PathBuf {
        self.root.join("prepared/test.csv")
    }

    pub fn prepare_record(&self) -> PathBuf {
        self.root.join("prepared/prepare.json")
    }

    pub fn model(&self, kind: ModelKind) -> PathBuf {
        self.root.join(format!("models/{}.json", kind.key()))
    }

    pub fn importance(&self, kind: ModelKind) -> PathBuf {
        self.root
            .join(format!("models/{}_importance.csv", kind.key()))
    }

    pub fn cv_table(&self, kind: ModelKind) -> PathBuf {
        self.root.join(format!("cv/{}.csv", kind.key()))
    }

    pub fn cv_curve(&self, kind: ModelKind, param: &str) -> PathBuf {
        self.root
            .join(format!("cv/{}_curve_{param}.csv", kind.key()))
    }

    pub fn cv_best(&self, kind: ModelKind) -> PathBuf {
        self.root.join(format!("cv/{}_best.json", kind.key()))
    }

    pub fn ensemble(&self) -> PathBuf {
        self.root.join("ensemble/ensemble.json")
    }

    pub fn ensemble_weights(&self) -> PathBuf {
        self.root.join("ensemble/weights.csv")
    }

    pub fn classifier_report(&self) -> PathBuf {
        self.root.join("reports/classifiers.csv")
    }

    pub fn ensemble_report(&self) -> PathBuf {
        self.root.join("reports/ensemble.csv")
    }

    pub fn summary_csv(&self) -> PathBuf {
        self.root.join("reports/summary.csv")
    }

    pub fn summary_txt(&self) -> PathBuf {
        self.root.join("reports/summary.txt")
    }
}

/// Raw data with gaps, before splitting.
#[derive(Debug, Clone)]
pub struct Source {
    pub data: MaskedDataset,
    pub label: String,
    pub description: String,
    pub warnings: Vec<String>,
}

pub fn load_source(cfg: &RunConfig) -> AppResult<Source> {
    match cfg.source()? {
        SourceSpec::Table(path) => {
            let schema = TableSchema {
                label: cfg.label.clone(),
                features: cfg.features.clone(),
            };
            let data = io::load_csv_dataset(&path, &schema)?;
            let (data, warnings) = zeros_to_missing(&MaskedDataset::from(data), &cfg.zero_missing)?;
            Ok(Source {
                data,
                label: cfg.label.clone(),
                description: format!("table {}", path.display()),
                warnings: warnings.iter().map(ToString::to_string).collect(),
            })
        }
        SourceSpec::Vitals {
            vitals,
            demographics,
        } => {
            let records = io::load_vitals(&vitals)?;
            let demo = io::load_demographics(&demographics)?;
            Ok(Source {
                data: to_dataset(&aggregate_vitals(&records, &demo)?)?,
                label: VITALS_LABEL.into(),
                description: format!(
                    "vitals {} + demographics {}",
                    vitals.display(),
                    demographics.display()
                ),
                warnings: Vec::new(),
            })
        }
        SourceSpec::Synthetic(n) => {
            let (records, demo) = generate_synthetic_vitals(n, cfg.seed);
            Ok(Source {
                data: to_dataset(&aggregate_vitals(&records, &demo)?)?,
                label: VITALS_LABEL.into(),
                description: format!("synthetic vitals, {n} patients"),
                warnings: Vec::new(),
            })
        }
    }
}

/// Stratified train/test split of the raw source.
pub fn split_source(cfg: &RunConfig, source: &Source) -> AppResult<(MaskedDataset, MaskedDataset)> {
    Ok(train_test_split_masked(
        &source.data,
        cfg.test_fraction,
        cfg.seed,
    )?)
}

fn fit_preprocessor(
    cfg: &RunConfig,
    all: &MaskedDataset,
    train: &MaskedDataset,
) -> AppResult<Preprocessor> {
    let p = if cfg.paper_faithful {
        Preprocessor::fit_with_imputation_source(all, train)?
    } else {
        Preprocessor::fit(train)?
    };
    Ok(p)
}

pub fn prepare(cfg: &RunConfig) -> AppResult<String> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    if let SourceSpec::Synthetic(n) = cfg.source()? {
        let (records, demo) = generate_synthetic_vitals(n, cfg.seed);
        io::save_vitals(&layout.raw_vitals(), &records)?;
        io::save_demographics(&layout.raw_demographics(), &demo)?;
    }
    let source = load_source(cfg)?;
    let (train_raw, test_raw) = split_source(cfg, &source)?;
    let pre = fit_preprocessor(cfg, &source.data, &train_raw)?;
    let train = pre.apply(&train_raw)?;
    let test = pre.apply(&test_raw)?;
    let names = source.data.feature_names().to_vec();
    let mut warnings = source.warnings.clone();
    warnings.extend(
        pre.standardizer
            .warnings(&names)
            .iter()
            .map(ToString::to_string),
    );

    io::save_dataset_csv(&layout.train_csv(), &train, &source.label)?;
    io::save_dataset_csv(&layout.test_csv(), &test, &source.label)?;
    let record = PrepareRecord {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        source: source.description.clone(),
        test_fraction: cfg.test_fraction,
        paper_faithful: cfg.paper_faithful,
        label: source.label.clone(),
        feature_names: names,
        n_train: train.n_rows(),
        n_test: test.n_rows(),
        train_class_counts: train.class_counts(),
        test_class_counts: test.class_counts(),
        preprocessor: pre,
        warnings: warnings.clone(),
    };
    write_json(&layout.prepare_record(), &record)?;

    let mut out = String::new();
    for w in &warnings {
        writeln!(out, "warning: {w}").ok();
    }
    writeln!(
        out,
        "prepared {} training and {} test rows with {} features from {} (seed {})",
        record.n_train,
        record.n_test,
        record.feature_names.len(),
        record.source,
        cfg.seed
    )
    .ok();
    Ok(out)
}

/// Processed splits plus their sidecar, checked against the current run.
pub fn load_prepared(cfg: &RunConfig) -> AppResult<(PrepareRecord, Dataset, Dataset)> {
    let layout = Layout::new(&cfg.out_dir);
    let path = layout.prepare_record();
    if !path.exists() {
        return Err(AppError::Usage(format!(
            "no prepared data in {}; run `prepare` first",
            cfg.out_dir.display()
        )));
    }
    let record: PrepareRecord = read_json(&path)?;
    if record.seed != cfg.seed
        || record.test_fraction != cfg.test_fraction
        || record.paper_faithful != cfg.paper_faithful
    {
        return Err(AppError::Usage(format!(
            "prepared data used seed {}, test fraction {}, paper-faithful {}; rerun `prepare` or match those settings",
            record.seed, record.test_fraction, record.paper_faithful
        )));
    }
    let schema = TableSchema::new(record.label.clone(), record.feature_names.clone());
    let train = io::load_csv_dataset(&layout.train_csv(), &schema)?;
    let test = io::load_csv_dataset(&layout.test_csv(), &schema)?;
    Ok((record, train, test))
}

fn write_importance(path: &Path, names: &[String], values: &[f64], seed: u64) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(io::create_file(path)?);
    let fail = |e: csv::Error| AppError::io(path, e);
    w.write_record(["feature", "importance", "seed"])
        .map_err(fail)?;
    for (name, v) in names.iter().zip(values) {
        w.write_record([name.clone(), format!("{v:.6}"), seed.to_string()])
            .map_err(fail)?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

/// Trains one classifier on the prepared training split and scores it on the
/// test split.
pub fn train(
    cfg: &RunConfig,
    kind: ModelKind,
    overrides: &[(String, String)],
    use_cv: bool,
) -> AppResult<String> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let (record, train, test) = load_prepared(cfg)?;
    let mut params = if use_cv {
        let path = layout.cv_best(kind);
        if !path.exists() {
            return Err(AppError::Usage(format!(
                "no tuning results for {kind}; run `cv {kind}` first"
            )));
        }
        read_json::<CvBest>(&path)?.params
    } else {
        cfg.params.clone()
    };
    params.seed = cfg.seed;
    for (name, value) in overrides {
        params.set(name, value)?;
    }

    let model = ModelSpec::new(kind, params.clone())
        .fit(&train)
        .context(format!("training {}", kind.title()))?;
    let test_report = evaluate(&model, &test).context(format!("evaluating {}", kind.title()))?;
    if let Ok(importance) = model.feature_importance() {
        write_importance(
            &layout.importance(kind),
            &record.feature_names,
            &importance,
            cfg.seed,
        )?;
    }
    write_json(
        &layout.model(kind),
        &ModelArtifact {
            schema_version: SCHEMA_VERSION,
            seed: cfg.seed,
            kind,
            params,
            feature_names: record.feature_names.clone(),
            preprocessor: record.preprocessor.clone(),
            model,
            test_report,
        },
    )?;
    let row = ReportRow::new(kind.title(), &test_report, cfg.seed);
    report::append_rows(&layout.classifier_report(), std::slice::from_ref(&row))?;
    Ok(report::render_table(&[row]))
}

fn sweeps_for(
    cfg: &RunConfig,
    kind: ModelKind,
    cli: &[(String, String)],
) -> AppResult<Vec<(String, Vec<String>)>> {
    let relevant = HyperParams::relevant_names(kind);
    let mut specs: Vec<(String, String)> = cfg
        .grid
        .iter()
        .filter(|(name, _)| relevant.contains(&name.as_str()))
        .map(|(n, v)| (n.clone(), v.clone()))
        .collect();
    for (name, value) in cli {
        match specs.iter_mut().find(|(n, _)| n == name) {
            Some(entry) => entry.1 = value.clone(),
            None => specs.push((name.clone(), value.clone())),
        }
    }
    specs
        .into_iter()
        .map(|(n, v)| Ok((n, parse_sweep_values(&v)?)))
        .collect()
}

fn summary_cells(summary: Option<(f64, f64)>) -> [String; 2] {
    match summary {
        Some((m, s)) => [format!("{m:.4}"), format!("{s:.4}")],
        None => ["NA".into(), "NA".into()],
    }
}

/// Cross-validated grid search over the training split.
pub fn cv(cfg: &RunConfig, kind: ModelKind, sweeps: &[(String, String)]) -> AppResult<String> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let objective = cfg.objective()?;
    let sweeps = sweeps_for(cfg, kind, sweeps)?;
    let grid: Vec<ModelSpec> = expand_grid(&cfg.hyper_params(), &sweeps)?
        .into_iter()
        .map(|p| ModelSpec::new(kind, p))
        .collect();
    if grid.is_empty() {
        return Err(diabetes_core::Error::EmptyGrid.into());
    }
    let source = load_source(cfg)?;
    let (train_raw, _) = split_source(cfg, &source)?;
    let options = CvOptions {
        folds: cfg.folds,
        seed: cfg.seed,
        imputation: cfg.imputation(),
    };
    let found = grid_search(&train_raw, &grid, &options, objective)
        .context(format!("cross-validating {}", kind.title()))?;

    let param_names: Vec<&str> = HyperParams::relevant_names(kind)
        .iter()
        .copied()
        .filter(|n| *n != "seed")
        .collect();
    let table = layout.cv_table(kind);
    let mut w = csv::Writer::from_writer(io::create_file(&table)?);
    let fail = |e: csv::Error| AppError::io(&table, e);
    let mut header: Vec<String> = param_names.iter().map(|s| s.to_string()).collect();
    for m in Metric::ALL {
        header.push(format!("{} mean", m.title()));
        header.push(format!("{} std", m.title()));
    }
    header.extend(["Log Loss mean", "Log Loss std", "Train Error", "seed"].map(String::from));
    w.write_record(&header).map_err(fail)?;
    for r in &found.results {
        let mut row: Vec<String> = param_names
            .iter()
            .map(|n| r.config.params.get(n).unwrap_or_default())
            .collect();
        for m in Metric::ALL {
            row.extend(summary_cells(r.metric_summary(m)));
        }
        row.extend(summary_cells(Some(r.log_loss_summary())));
        row.push(format!("{:.4}", 1.0 - r.mean_train_accuracy()));
        row.push(cfg.seed.to_string());
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| AppError::io(&table, e))?;

    let best = found.best();
    for (param, _) in &sweeps {
        // Vary `param`; hold every other swept value at the winner's.
        let others: Vec<(&str, Option<String>)> = sweeps
            .iter()
            .filter(|(n, _)| n != param)
            .map(|(n, _)| (n.as_str(), best.config.params.get(n)))
            .collect();
        let line: Vec<_> = found
            .results
            .iter()
            .filter(|r| others.iter().all(|(n, v)| r.config.params.get(n) == *v))
            .cloned()
            .collect();
        let points = error_curve(&line, param)?;
        let path = layout.cv_curve(kind, param);
        let mut w = csv::Writer::from_writer(io::create_file(&path)?);
        let fail = |e: csv::Error| AppError::io(&path, e);
        w.write_record([
            param.as_str(),
            "train_error",
            "validation_error",
            "validation_error_std",
            "seed",
        ])
        .map_err(fail)?;
        for p in points {
            w.write_record([
                p.value,
                format!("{:.4}", p.train_error),
                format!("{:.4}", p.validation_error),
                format!("{:.4}", p.validation_error_std),
                cfg.seed.to_string(),
            ])
            .map_err(fail)?;
        }
        w.flush().map_err(|e| AppError::io(&path, e))?;
    }

    let mut best_params = best.config.params.clone();
    best_params.seed = cfg.seed;
    write_json(
        &layout.cv_best(kind),
        &CvBest {
            schema_version: SCHEMA_VERSION,
            seed: cfg.seed,
            kind,
            objective,
            folds: cfg.folds,
            best_index: found.best_index,
            params: best_params,
            mean_report: best.mean_report(),
            mean_log_loss: best.mean_log_loss(),
        },
    )?;

    let chosen: Vec<String> = param_names
        .iter()
        .map(|n| format!("{n}={}", best.config.params.get(n).unwrap_or_default()))
        .collect();
    let mut out = format!(
        "{} configurations, {} folds; best by mean {}: {}\n",
        found.results.len(),
        cfg.folds,
        objective.name(),
        chosen.join(" ")
    );
    out.push_str(&report::render_table(&[ReportRow::new(
        kind.title(),
        &best.mean_report(),
        cfg.seed,
    )]));
    Ok(out)
}

fn read_weight_file(path: &Path) -> AppResult<Vec<(ModelKind, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| AppError::io(path, e))?;
    let headers = rdr.headers().map_err(|e| AppError::io(path, e))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| AppError::Data(format!("{}: missing column `{name}`", path.display())))
    };
    let (m_at, w_at) = (find("member")?, find("weight")?);
    let mut out = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| AppError::io(path, e))?;
        let kind: ModelKind = record
            .get(m_at)
            .unwrap_or("")
            .parse()
            .context(path.display())?;
        let cell = record.get(w_at).unwrap_or("");
        let weight: f64 = cell.parse().map_err(|_| {
            AppError::Data(format!(
                "{}: row {}, column `weight`: cannot parse `{cell}`",
                path.display(),
                r + 1
            ))
        })?;
        out.push((kind, weight));
    }
    if out.is_empty() {
        return Err(AppError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

fn load_model(layout: &Layout, kind: ModelKind) -> AppResult<ModelArtifact> {
    let path = layout.model(kind);
    if !path.exists() {
        return Err(AppError::Usage(format!(
            "no trained {kind} model; run `train {kind}` first"
        )));
    }
    read_json(&path)
}

/// Selects members, fits voting weights on cross-validated predictions over
/// the training split and evaluates the ensemble on the test split. With `weights_file`
/// the members and weights are taken from that file instead.
pub fn ensemble(cfg: &RunConfig, weights_file: Option<&Path>) -> AppResult<String> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let (record, _, test) = load_prepared(cfg)?;
    let source = load_source(cfg)?;
    let (train_raw, _) = split_source(cfg, &source)?;
    let options = CvOptions {
        folds: cfg.folds,
        seed: cfg.seed,
        imputation: cfg.imputation(),
    };

    let (kinds, supplied, mut ranked) = match weights_file {
        Some(path) => {
            let pairs = read_weight_file(path)?;
            (
                pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
                Some(pairs.iter().map(|p| p.1).collect::<Vec<_>>()),
                Vec::new(),
            )
        }
        None => {
            let exclude = cfg.excluded_kinds()?;
            let candidates: Vec<ModelKind> = ModelKind::ALL
                .into_iter()
                .filter(|k| !exclude.contains(k))
                .collect();
            if candidates.is_empty() {
                return Err(diabetes_core::Error::AllExcluded.into());
            }
            let available: Vec<ModelKind> = candidates
                .into_iter()
                .filter(|k| layout.model(*k).exists())
                .collect();
            if available.len() < cfg.ensemble.members {
                let names: Vec<&str> = available.iter().map(|k| k.key()).collect();
                return Err(AppError::Usage(format!(
                    "{} members requested but only {} eligible trained models exist [{}]; run `train` for more kinds",
                    cfg.ensemble.members,
                    available.len(),
                    names.join(", ")
                )));
            }
            let mut reports = Vec::with_capacity(available.len());
            for &kind in &available {
                let spec = ModelSpec::new(kind, load_model(&layout, kind)?.params);
                reports.push(
                    cross_validate(&train_raw, &spec, &options)
                        .context(format!("ranking {}", kind.title()))?,
                );
            }
            (
                select_members(&reports, &exclude, cfg.ensemble.members)?,
                None,
                reports,
            )
        }
    };
    let artifacts = kinds
        .iter()
        .map(|&k| load_model(&layout, k))
        .collect::<AppResult<Vec<_>>>()?;

    // Weights are fitted on out-of-fold probabilities: every training row is
    // scored by a member that did not train on it.
    let labels = train_raw.labels();
    let mut val_probs = Vec::with_capacity(kinds.len());
    for a in &artifacts {
        let at = match ranked.iter().position(|r| r.config.kind == a.kind) {
            Some(at) => at,
            None => {
                let spec = ModelSpec::new(a.kind, a.params.clone());
                ranked.push(
                    cross_validate(&train_raw, &spec, &options)
                        .context(format!("cross-validating {}", a.kind.title()))?,
                );
                ranked.len() - 1
            }
        };
        let probs = ranked[at]
            .out_of_fold_probas(train_raw.n_rows())
            .ok_or_else(|| {
                AppError::Numeric(format!(
                    "{}: incomplete out-of-fold predictions",
                    a.kind.title()
                ))
            })?;
        val_probs.push(probs);
    }
    let (weights, val_loss, member_losses) = match supplied {
        Some(w) => {
            let loss = ensemble_log_loss(&val_probs, labels, &w)?;
            let members = val_probs
                .iter()
                .map(|p| log_loss(p, labels, LOG_LOSS_EPSILON))
                .collect::<Result<Vec<_>, _>>()?;
            (w, loss, members)
        }
        None => {
            let fit = optimize_weights_from_probas(
                &val_probs,
                labels,
                cfg.seed,
                &WeightSearchOptions::default(),
            )?;
            (fit.weights, fit.loss, fit.member_losses)
        }
    };

    let members: Vec<_> = artifacts.iter().map(|a| a.model.clone()).collect();
    let ens = EnsembleModel::new(members, weights.clone())?;
    if ens.n_features() != test.n_features() {
        return Err(AppError::Data(format!(
            "member models expect {} features but the prepared data has {}; retrain them",
            ens.n_features(),
            test.n_features()
        )));
    }
    let test_report = evaluate(&ens, &test)?;

    let weights_path = layout.ensemble_weights();
    let mut w = csv::Writer::from_writer(io::create_file(&weights_path)?);
    let fail = |e: csv::Error| AppError::io(&weights_path, e);
    w.write_record([
        "member",
        "weight",
        "member_log_loss",
        "ensemble_log_loss",
        "seed",
    ])
    .map_err(fail)?;
    for ((k, wt), l) in kinds.iter().zip(&weights).zip(&member_losses) {
        w.write_record([
            k.key().to_string(),
            wt.to_string(),
            format!("{l:.6}"),
            format!("{val_loss:.6}"),
            cfg.seed.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| AppError::io(&weights_path, e))?;
    write_json(
        &layout.ensemble(),
        &EnsembleArtifact {
            schema_version: SCHEMA_VERSION,
            seed: cfg.seed,
            members: kinds.clone(),
            weights: weights.clone(),
            validation_log_loss: val_loss,
            member_validation_log_loss: member_losses.clone(),
            feature_names: record.feature_names.clone(),
            preprocessor: record.preprocessor.clone(),
            ensemble: ens,
            test_report,
        },
    )?;
    let row = ReportRow::new(ENSEMBLE_ROW, &test_report, cfg.seed);
    report::write_rows(&layout.ensemble_report(), std::slice::from_ref(&row))?;

    let mut out = String::new();
    for ((k, wt), l) in kinds.iter().zip(&weights).zip(&member_losses) {
        writeln!(
            out,
            "{:<20} weight {wt:.4}  validation log loss {l:.4}",
            k.title()
        )
        .ok();
    }
    writeln!(
        out,
        "{:<20} validation log loss {val_loss:.4}",
        ENSEMBLE_ROW
    )
    .ok();
    out.push_str(&report::render_table(&[row]));
    Ok(out)
}

/// Merges the latest row per classifier with the ensemble row.
pub fn report(cfg: &RunConfig) -> AppResult<String> {
    let layout = Layout::new(&cfg.out_dir);
    let classifier_rows = report::read_rows(&layout.classifier_report())?;
    let ensemble_rows = report::read_rows(&layout.ensemble_report())?;
    if classifier_rows.is_empty() && ensemble_rows.is_empty() {
        return Err(AppError::Data(format!(
            "no report rows found in {}; run `train` or `ensemble` first",
            layout.root().join("reports").display()
        )));
    }
    let mut latest: Vec<ReportRow> = Vec::new();
    for row in classifier_rows {
        match latest.iter_mut().find(|r| r.model == row.model) {
            Some(slot) => *slot = row,
            None => latest.push(row),
        }
    }
    let rank = |name: &str| {
        ModelKind::ALL
            .iter()
            .position(|k| k.title() == name)
            .unwrap_or(usize::MAX)
    };
    latest.sort_by_key(|r| rank(&r.model));
    let has_ensemble = !ensemble_rows.is_empty();
    latest.extend(ensemble_rows.last().cloned());

    report::write_rows(&layout.summary_csv(), &latest)?;
    let mut text = report::render_table(&latest);
    if !has_ensemble {
        text.push_str("note: no ensemble results yet; run `ensemble` to add them\n");
    }
    report::write_text(&layout.summary_txt(), &text)?;
    Ok(text)
}
