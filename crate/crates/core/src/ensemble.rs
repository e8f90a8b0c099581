//! Weighted soft voting.
//!
//! The ensemble probability is `sum(w_i p_i) / sum(w_i)`. Weights are stored
//! exactly as given (they need not sum to one) and normalized only when
//! combining. Normalized weights are snapped to a 2^-32 grid so that scaling
//! the whole vector by a positive constant reproduces every probability
//! bit for bit.
//!
//! Weights are fitted by minimizing log loss over the probability simplex,
//! parameterized through a softmax and searched with multi-start
//! Nelder-Mead. Every one-hot vertex is also evaluated exactly, so the fitted
//! ensemble is never worse than its best single member on the fitting data.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classifiers::{Classifier, ModelKind, ModelSpec, TrainedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::metrics::{confusion_matrix, log_loss, MetricReport, LOG_LOSS_EPSILON};
use crate::model_selection::CvResult;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::DEFAULT_THRESHOLD;

const WEIGHT_GRID: f64 = 4_294_967_296.0; // 2^32

/// Normalizes `weights` to sum to one on a 2^-32 grid.
pub fn effective_weights(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidWeights);
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidWeights);
    }
    let q: Vec<f64> = weights
        .iter()
        .map(|w| libm::round(w / total * WEIGHT_GRID) / WEIGHT_GRID)
        .collect();
    if q.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidWeights);
    }
    Ok(q)
}

/// Weighted mean of member probabilities under effective weights `q`,
/// clamped into the range spanned by the positively weighted members.
pub fn combine(q: &[f64], probs: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&w, &p) in q.iter().zip(probs) {
        if w > 0.0 {
            num += w * p;
            den += w;
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    (num / den).clamp(lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "M: Serialize", deserialize = "M: Deserialize<'de>"))]
struct EnsembleRepr<M> {
    members: Vec<M>,
    weights: Vec<f64>,
    threshold: f64,
}

/// Member models with non-negative voting weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "EnsembleRepr<M>",
    into = "EnsembleRepr<M>",
    bound(
        serialize = "M: Serialize + Clone",
        deserialize = "M: Deserialize<'de> + Classifier"
    )
)]
pub struct EnsembleModel<M = TrainedModel> {
    members: Vec<M>,
    weights: Vec<f64>,
    effective: Vec<f64>,
    threshold: f64,
}

impl<M: Classifier> TryFrom<EnsembleRepr<M>> for EnsembleModel<M> {
    type Error = Error;

    fn try_from(r: EnsembleRepr<M>) -> Result<Self> {
        EnsembleModel::new(r.members, r.weights)?.with_threshold(r.threshold)
    }
}

impl<M> From<EnsembleModel<M>> for EnsembleRepr<M> {
    fn from(e: EnsembleModel<M>) -> Self {
        EnsembleRepr {
            members: e.members,
            weights: e.weights,
            threshold: e.threshold,
        }
    }
}

impl<M: Classifier> EnsembleModel<M> {
    pub fn new(members: Vec<M>, weights: Vec<f64>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid(
                "members",
                "an ensemble needs at least one member",
            ));
        }
        if weights.len() != members.len() {
            return Err(Error::LengthMismatch {
                expected: members.len(),
                found: weights.len(),
            });
        }
        let d = members[0].n_features();
        if let Some(m) = members.iter().find(|m| m.n_features() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.n_features(),
            });
        }
        let effective = effective_weights(&weights)?;
        Ok(Self {
            members,
            weights,
            effective,
            threshold: DEFAULT_THRESHOLD,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::invalid("threshold", "must lie in [0, 1]"));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn members(&self) -> &[M] {
        &self.members
    }

    /// Weights as supplied.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights as used for voting (normalized, on the 2^-32 grid).
    pub fn effective_weights(&self) -> &[f64] {
        &self.effective
    }

    /// Member probabilities for one input.
    pub fn member_probas(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.members.iter().map(|m| m.predict_proba(x)).collect()
    }
}

impl<M: Classifier> Classifier for EnsembleModel<M> {
    fn n_features(&self) -> usize {
        self.members[0].n_features()
    }

    fn proba_unchecked(&self, x: &[f64]) -> f64 {
        let probs: Vec<f64> = self.members.iter().map(|m| m.proba_unchecked(x)).collect();
        combine(&self.effective, &probs)
    }

    fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Soft-vote probability of `ensemble` for `x`.
pub fn soft_vote_proba<M: Classifier>(ensemble: &EnsembleModel<M>, x: &[f64]) -> Result<f64> {
    ensemble.predict_proba(x)
}

/// Six-metric report of any classifier on `test`.
pub fn evaluate<C: Classifier>(model: &C, test: &Dataset) -> Result<MetricReport> {
    if test.is_empty() {
        return Err(Error::NoDataRows);
    }
    Ok(confusion_matrix(&model.predict_batch(test)?, test.labels())?.report())
}

pub fn evaluate_ensemble<M: Classifier>(
    ensemble: &EnsembleModel<M>,
    test: &Dataset,
) -> Result<MetricReport> {
    evaluate(ensemble, test)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSearchOptions {
    /// Random restarts on top of the uniform and near-vertex starts.
    pub random_starts: usize,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for WeightSearchOptions {
    fn default() -> Self {
        Self {
            random_starts: 2,
            nelder_mead: NelderMeadOptions {
                initial_step: 1.0,
                max_iterations: 1500,
                f_tolerance: 1e-13,
                x_tolerance: 1e-9,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFit {
    /// Normalized weights (sum to one).
    pub weights: Vec<f64>,
    /// Ensemble log loss under `weights` on the fitting data.
    pub loss: f64,
    /// Log loss of each member alone on the fitting data.
    pub member_losses: Vec<f64>,
}

/// Ensemble log loss for `weights`, given per-member probability columns.
pub fn ensemble_log_loss(member_probs: &[Vec<f64>], labels: &[u8], weights: &[f64]) -> Result<f64> {
    let q = effective_weights(weights)?;
    let mut row = vec![0.0; member_probs.len()];
    let combined: Vec<f64> = (0..labels.len())
        .map(|i| {
            for (r, col) in row.iter_mut().zip(member_probs) {
                *r = col[i];
            }
            combine(&q, &row)
        })
        .collect();
    log_loss(&combined, labels, LOG_LOSS_EPSILON)
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| math::exp(v - max)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn normalize(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// Fits simplex weights minimizing log loss, from precomputed member
/// probabilities (`member_probs[m][i]` = member `m` on row `i`).
pub fn optimize_weights_from_probas(
    member_probs: &[Vec<f64>],
    labels: &[u8],
    seed: u64,
    options: &WeightSearchOptions,
) -> Result<WeightFit> {
    let m = member_probs.len();
    if m == 0 {
        return Err(Error::invalid("members", "need at least one member"));
    }
    if labels.is_empty() {
        return Err(Error::NoDataRows);
    }
    if let Some(col) = member_probs.iter().find(|c| c.len() != labels.len()) {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: col.len(),
        });
    }
    let counts = crate::dataset::class_counts(labels);
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::SingleClass);
    }

    let member_losses = member_probs
        .iter()
        .map(|col| log_loss(col, labels, LOG_LOSS_EPSILON))
        .collect::<Result<Vec<_>>>()?;
    if m == 1 {
        return Ok(WeightFit {
            weights: vec![1.0],
            loss: member_losses[0],
            member_losses,
        });
    }

    let loss_of = |w: &[f64]| ensemble_log_loss(member_probs, labels, w).unwrap_or(f64::INFINITY);

    // Candidates in priority order: exact vertices, the centre, then the
    // simplex searches. The first candidate with the lowest loss wins.
    let mut candidates: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut w = vec![0.0; m];
            w[i] = 1.0;
            w
        })
        .collect();
    candidates.push(vec![1.0 / m as f64; m]);

    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; m]];
    for i in 0..m {
        let mut z = vec![0.0; m];
        z[i] = 3.0;
        starts.push(z);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.5).expect("positive spread");
    for _ in 0..options.random_starts {
        starts.push((0..m).map(|_| normal.sample(&mut rng)).collect());
    }
    for start in &starts {
        let found = nelder_mead(|z| loss_of(&softmax(z)), start, &options.nelder_mead);
        candidates.push(normalize(&softmax(&found.x)));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for w in candidates {
        let l = loss_of(&w);
        if best.as_ref().is_none_or(|(_, bl)| l < *bl) {
            best = Some((w, l));
        }
    }
    let (weights, loss) = best.expect("at least one candidate");
    Ok(WeightFit {
        weights,
        loss,
        member_losses,
    })
}

/// Fits voting weights for trained `members` on `data` (normally a held-out
/// validation split).
pub fn optimize_weights<M: Classifier>(
    members: &[M],
    data: &Dataset,
    seed: u64,
) -> Result<WeightFit> {
    let probs = members
        .iter()
        .map(|m| m.predict_proba_batch(data))
        .collect::<Result<Vec<_>>>()?;
    optimize_weights_from_probas(&probs, data.labels(), seed, &WeightSearchOptions::default())
}

/// Default ensemble size.
pub const DEFAULT_MEMBER_COUNT: usize = 3;

/// Picks up to `count` model kinds with the lowest mean validation log loss,
/// skipping `exclude`. Ties keep report order; a kind appearing in several
/// reports is ranked by its best one.
pub fn select_members(
    reports: &[CvResult<ModelSpec>],
    exclude: &[ModelKind],
    count: usize,
) -> Result<Vec<ModelKind>> {
    if reports.is_empty() {
        return Err(Error::invalid(
            "reports",
            "no cross-validation results to select from",
        ));
    }
    let mut ranked: Vec<(usize, ModelKind, f64)> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !exclude.contains(&r.config.kind))
        .map(|(i, r)| {
            let loss = r.mean_log_loss();
            (
                i,
                r.config.kind,
                if loss.is_nan() { f64::INFINITY } else { loss },
            )
        })
        .collect();
    if ranked.is_empty() {
        return Err(Error::AllExcluded);
    }
    ranked.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)));
    let mut out: Vec<ModelKind> = Vec::new();
    for (_, kind, _) in ranked {
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    out.truncate(count.max(1));
    Ok(out)
}
