//! Tabular datasets and the preprocessing applied before training:
//! zero-as-missing masking, mean imputation, z-score standardization and
//! stratified train/test splitting.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// Dense feature matrix (row-major) with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
}

/// A dataset whose cells may be missing. Missing cells only exist between
/// loading and imputation; they are never serialized.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedDataset {
    features: Vec<Option<f64>>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
}

/// Non-fatal conditions found while preprocessing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Every cell of the column became missing after zero masking.
    AllMissing { column: String },
    /// The column has zero spread in the training data; it standardizes to 0.
    ConstantFeature { column: String },
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Warning::AllMissing { column } => write!(f, "column `{column}` is entirely missing"),
            Warning::ConstantFeature { column } => {
                write!(f, "column `{column}` is constant; it standardizes to 0")
            }
        }
    }
}

fn check_labels(labels: &[u8]) -> Result<()> {
    match labels.iter().position(|&l| l > 1) {
        Some(index) => Err(Error::NonBinaryLabel {
            index,
            value: f64::from(labels[index]),
        }),
        None => Ok(()),
    }
}

fn check_shape(cells: usize, labels: usize, names: usize) -> Result<()> {
    if names == 0 {
        return Err(Error::invalid(
            "feature_names",
            "at least one feature is required",
        ));
    }
    if cells != labels * names {
        return Err(Error::LengthMismatch {
            expected: labels * names,
            found: cells,
        });
    }
    Ok(())
}

/// Converts real-valued labels to `{0, 1}`, rejecting anything else.
pub fn binary_labels(values: &[f64]) -> Result<Vec<u8>> {
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value == 0.0 {
                Ok(0)
            } else if value == 1.0 {
                Ok(1)
            } else {
                Err(Error::NonBinaryLabel { index, value })
            }
        })
        .collect()
}

fn column_position(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownColumn(name.to_string()))
}

impl Dataset {
    pub fn new(features: Vec<f64>, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        check_shape(features.len(), labels.len(), feature_names.len())?;
        check_labels(&labels)?;
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    /// Builds a dataset from row slices; feature names default to `x0, x1, ...`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: &[u8]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut features = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        let names = (0..d).map(|j| format!("x{j}")).collect();
        Self::new(features, labels.to_vec(), names)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::LengthMismatch {
                expected: self.n_features(),
                found: names.len(),
            });
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features())
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.features[row * self.n_features() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.rows().map(|r| r[col]).collect()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        column_position(&self.feature_names, name)
    }

    /// Row counts of class 0 and class 1.
    pub fn class_counts(&self) -> [usize; 2] {
        class_counts(&self.labels)
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features());
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Applies `f(column, value)` to every cell.
    pub fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let d = self.n_features();
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(k, &v)| f(k % d, v))
            .collect();
        Self {
            features,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

impl MaskedDataset {
    pub fn new(
        features: Vec<Option<f64>>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        check_shape(features.len(), labels.len(), feature_names.len())?;
        check_labels(&labels)?;
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[Option<f64>] {
        let d = self.n_features();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[Option<f64>]> + '_ {
        self.features.chunks_exact(self.n_features())
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        column_position(&self.feature_names, name)
    }

    pub fn class_counts(&self) -> [usize; 2] {
        class_counts(&self.labels)
    }

    pub fn missing_count(&self) -> usize {
        self.features.iter().filter(|c| c.is_none()).count()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features());
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Sets a single cell. Used by tests and by callers patching known-bad values.
    pub fn set(&mut self, row: usize, col: usize, value: Option<f64>) {
        let d = self.n_features();
        self.features[row * d + col] = value;
    }

    /// Returns the dense dataset if no cell is missing.
    pub fn to_dense(&self) -> Option<Dataset> {
        let features = self
            .features
            .iter()
            .copied()
            .collect::<Option<Vec<f64>>>()?;
        Some(Dataset {
            features,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        })
    }
}

impl From<Dataset> for MaskedDataset {
    fn from(data: Dataset) -> Self {
        Self {
            features: data.features.into_iter().map(Some).collect(),
            labels: data.labels,
            feature_names: data.feature_names,
        }
    }
}

impl From<&Dataset> for MaskedDataset {
    fn from(data: &Dataset) -> Self {
        data.clone().into()
    }
}

pub(crate) fn class_counts(labels: &[u8]) -> [usize; 2] {
    let ones = labels.iter().filter(|&&l| l == 1).count();
    [labels.len() - ones, ones]
}

/// Marks every exact-zero cell of the named columns as missing.
///
/// Columns that end up entirely missing are reported as warnings; imputation
/// will reject them later unless the caller drops them.
pub fn zeros_to_missing<S: AsRef<str>>(
    data: &MaskedDataset,
    columns: &[S],
) -> Result<(MaskedDataset, Vec<Warning>)> {
    let cols = columns
        .iter()
        .map(|c| data.column_index(c.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = data.clone();
    let d = data.n_features();
    for (k, cell) in out.features.iter_mut().enumerate() {
        if *cell == Some(0.0) && cols.contains(&(k % d)) {
            *cell = None;
        }
    }
    let mut warnings = Vec::new();
    for &c in &cols {
        if out.n_rows() > 0 && out.rows().all(|r| r[c].is_none()) {
            let column = out.feature_names[c].clone();
            if !warnings
                .iter()
                .any(|w| matches!(w, Warning::AllMissing { column: x } if *x == column))
            {
                warnings.push(Warning::AllMissing { column });
            }
        }
    }
    Ok((out, warnings))
}

/// Per-column means of the non-missing training cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanImputer {
    means: Vec<f64>,
}

impl MeanImputer {
    pub fn fit(train: &MaskedDataset) -> Result<Self> {
        let d = train.n_features();
        let mut sums = vec![0.0; d];
        let mut counts = vec![0usize; d];
        for row in train.rows() {
            for (j, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    sums[j] += v;
                    counts[j] += 1;
                }
            }
        }
        let means = (0..d)
            .map(|j| {
                if counts[j] == 0 {
                    Err(Error::ColumnAllMissing(train.feature_names[j].clone()))
                } else {
                    Ok(sums[j] / counts[j] as f64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { means })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn apply(&self, data: &MaskedDataset) -> Result<Dataset> {
        if data.n_features() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: data.n_features(),
            });
        }
        let d = self.means.len();
        let features = data
            .features
            .iter()
            .enumerate()
            .map(|(k, cell)| cell.unwrap_or(self.means[k % d]))
            .collect();
        Ok(Dataset {
            features,
            labels: data.labels.clone(),
            feature_names: data.feature_names.clone(),
        })
    }
}

/// Fills the gaps of `apply_to` with column means computed on `train` alone.
pub fn impute_mean(train: &MaskedDataset, apply_to: &MaskedDataset) -> Result<Dataset> {
    MeanImputer::fit(train)?.apply(apply_to)
}

/// Z-score parameters fitted on training data, population variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    means: Vec<f64>,
    std_devs: Vec<f64>,
    constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.n_rows() < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                found: train.n_rows(),
            });
        }
        let d = train.n_features();
        let mut means = Vec::with_capacity(d);
        let mut std_devs = Vec::with_capacity(d);
        let mut constant = Vec::with_capacity(d);
        for j in 0..d {
            let col = train.column(j);
            let mean = math::mean(&col);
            let sd = math::sqrt(math::population_variance(&col));
            // Spread this small relative to the magnitude is rounding noise.
            let is_constant = !(sd > 1e-12 * math::abs(mean).max(1.0));
            means.push(mean);
            std_devs.push(if is_constant { 1.0 } else { sd });
            constant.push(is_constant);
        }
        Ok(Self {
            means,
            std_devs,
            constant,
        })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn std_devs(&self) -> &[f64] {
        &self.std_devs
    }

    /// Indices of zero-spread features; they map to 0.
    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.constant.len())
            .filter(|&j| self.constant[j])
            .collect()
    }

    pub fn warnings(&self, names: &[String]) -> Vec<Warning> {
        self.constant_features()
            .into_iter()
            .map(|j| Warning::ConstantFeature {
                column: names.get(j).cloned().unwrap_or_else(|| format!("x{j}")),
            })
            .collect()
    }

    pub fn transform_value(&self, col: usize, value: f64) -> f64 {
        if self.constant[col] {
            0.0
        } else {
            (value - self.means[col]) / self.std_devs[col]
        }
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.n_features() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: data.n_features(),
            });
        }
        Ok(data.map_values(|j, v| self.transform_value(j, v)))
    }
}

/// Imputation followed by standardization, fitted once and replayed on any
/// split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub imputer: MeanImputer,
    pub standardizer: Standardizer,
}

impl Preprocessor {
    /// Fits both stages on `train`.
    pub fn fit(train: &MaskedDataset) -> Result<Self> {
        Self::fit_with_imputation_source(train, train)
    }

    /// Fits imputation means on `imputation_source` and the standardizer on
    /// the imputed `train` rows. Passing the full dataset as the source
    /// reproduces whole-dataset imputation.
    pub fn fit_with_imputation_source(
        imputation_source: &MaskedDataset,
        train: &MaskedDataset,
    ) -> Result<Self> {
        let imputer = MeanImputer::fit(imputation_source)?;
        let standardizer = Standardizer::fit(&imputer.apply(train)?)?;
        Ok(Self {
            imputer,
            standardizer,
        })
    }

    pub fn apply(&self, data: &MaskedDataset) -> Result<Dataset> {
        self.standardizer.apply(&self.imputer.apply(data)?)
    }

    pub fn n_features(&self) -> usize {
        self.imputer.means.len()
    }
}

/// Stratified split of row indices into `(train, test)`, both in ascending
/// order.
///
/// The overall test size is `round(n * test_fraction)`; it is shared between
/// the classes by largest remainder so each class contributes within one row
/// of its exact proportion.
pub fn stratified_split_indices(
    labels: &[u8],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(
            "test_fraction",
            "must lie strictly between 0 and 1",
        ));
    }
    let n = labels.len();
    if n < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            found: n,
        });
    }
    check_labels(labels)?;
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        by_class[usize::from(l)].push(i);
    }
    for (label, rows) in by_class.iter().enumerate() {
        if rows.is_empty() {
            return Err(Error::EmptyClass { label: label as u8 });
        }
    }

    let total = libm::round(n as f64 * test_fraction).clamp(1.0, (n - 1) as f64) as usize;
    let exact = [
        by_class[0].len() as f64 * test_fraction,
        by_class[1].len() as f64 * test_fraction,
    ];
    let mut quota = [
        libm::floor(exact[0]) as usize,
        libm::floor(exact[1]) as usize,
    ];
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (exact[b] - quota[b] as f64).total_cmp(&(exact[a] - quota[a] as f64)));
    let mut remaining = total.saturating_sub(quota[0] + quota[1]);
    for &c in order.iter().cycle().take(4) {
        if remaining == 0 {
            break;
        }
        if quota[c] < by_class[c].len() {
            quota[c] += 1;
            remaining -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(n - total);
    let mut test = Vec::with_capacity(total);
    for (c, rows) in by_class.iter_mut().enumerate() {
        rows.shuffle(&mut rng);
        test.extend_from_slice(&rows[..quota[c]]);
        train.extend_from_slice(&rows[quota[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified, seeded train/test split of a dense dataset.
pub fn train_test_split(
    data: &Dataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let (train, test) = stratified_split_indices(data.labels(), test_fraction, seed)?;
    Ok((data.subset(&train), data.subset(&test)))
}

/// [`train_test_split`] for data that still has gaps.
pub fn train_test_split_masked(
    data: &MaskedDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(MaskedDataset, MaskedDataset)> {
    let (train, test) = stratified_split_indices(data.labels(), test_fraction, seed)?;
    Ok((data.subset(&train), data.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|j| format!("c{j}")).collect()
    }

    fn masked(cols: &[&[f64]]) -> MaskedDataset {
        let n = cols[0].len();
        let mut cells = Vec::new();
        for i in 0..n {
            for c in cols {
                cells.push(Some(c[i]));
            }
        }
        MaskedDataset::new(cells, vec![0; n], names(cols.len())).unwrap()
    }

    #[test]
    fn zero_masking_only_touches_named_columns() {
        let data = masked(&[&[0.0, 70.0, 80.0], &[0.0, 1.0, 2.0]]);
        let (out, warnings) = zeros_to_missing(&data, &["c0"]).unwrap();
        assert_eq!(out.row(0), &[None, Some(0.0)]);
        assert_eq!(out.row(1), &[Some(70.0), Some(1.0)]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn zero_masking_without_zeros_is_identity() {
        let data = masked(&[&[60.0, 70.0, 80.0]]);
        let (out, _) = zeros_to_missing(&data, &["c0"]).unwrap();
        assert_eq!(out, data);
    }

    #[test]
    fn all_zero_column_is_flagged() {
        let data = masked(&[&[0.0, 0.0], &[1.0, 2.0]]);
        let (out, warnings) = zeros_to_missing(&data, &["c0"]).unwrap();
        assert_eq!(out.missing_count(), 2);
        assert_eq!(
            warnings,
            vec![Warning::AllMissing {
                column: "c0".to_string()
            }]
        );
    }

    #[test]
    fn zero_masking_rejects_unknown_column() {
        let data = masked(&[&[1.0]]);
        assert_eq!(
            zeros_to_missing(&data, &["weight"]).unwrap_err(),
            Error::UnknownColumn("weight".to_string())
        );
    }

    #[test]
    fn imputation_uses_training_means() {
        let train = MaskedDataset::new(vec![None, Some(70.0), Some(80.0)], vec![0, 1, 0], names(1))
            .unwrap();
        let test = MaskedDataset::new(vec![None, Some(10.0)], vec![0, 1], names(1)).unwrap();
        let imputer = MeanImputer::fit(&train).unwrap();
        assert_eq!(imputer.means(), &[75.0]);
        assert_eq!(imputer.apply(&test).unwrap().features(), &[75.0, 10.0]);
        assert_eq!(
            impute_mean(&train, &train).unwrap().features(),
            &[75.0, 70.0, 80.0]
        );
    }

    #[test]
    fn imputation_without_gaps_is_identity() {
        let data = masked(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let out = impute_mean(&data, &data).unwrap();
        assert_eq!(MaskedDataset::from(out), data);
    }

    #[test]
    fn imputation_rejects_fully_missing_column() {
        let train = MaskedDataset::new(vec![None, None], vec![0, 1], names(1)).unwrap();
        assert_eq!(
            MeanImputer::fit(&train).unwrap_err(),
            Error::ColumnAllMissing("c0".to_string())
        );
    }

    #[test]
    fn standardizer_matches_population_convention() {
        let data = Dataset::from_rows(&[[1.0], [2.0], [3.0]], &[0, 1, 0]).unwrap();
        let s = Standardizer::fit(&data).unwrap();
        assert_eq!(s.means(), &[2.0]);
        assert!((s.std_devs()[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let z = s.apply(&data).unwrap();
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (a, b) in z.features().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn standardizing_standardized_data_is_identity() {
        let data = Dataset::from_rows(
            &[[1.0, 10.0], [2.0, -4.0], [7.0, 3.0], [0.5, 0.0]],
            &[0, 1, 0, 1],
        )
        .unwrap();
        let z = Standardizer::fit(&data).unwrap().apply(&data).unwrap();
        let zz = Standardizer::fit(&z).unwrap().apply(&z).unwrap();
        for (a, b) in z.features().iter().zip(zz.features()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_feature_maps_to_zero_with_warning() {
        let data = Dataset::from_rows(&[[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]], &[0, 1, 0]).unwrap();
        let s = Standardizer::fit(&data).unwrap();
        assert_eq!(s.constant_features(), vec![0]);
        assert_eq!(
            s.warnings(data.feature_names()),
            vec![Warning::ConstantFeature {
                column: "x0".to_string()
            }]
        );
        let z = s.apply(&data).unwrap();
        assert_eq!(z.column(0), vec![0.0, 0.0, 0.0]);
        assert!(z.features().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn standardizer_needs_two_rows() {
        let data = Dataset::from_rows(&[[5.0]], &[0]).unwrap();
        assert!(matches!(
            Standardizer::fit(&data),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn split_is_stratified_for_balanced_classes() {
        let labels: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
        let (train, test) = stratified_split_indices(&labels, 0.25, 7).unwrap();
        assert_eq!((train.len(), test.len()), (75, 25));
        let test_pos = test.iter().filter(|&&i| labels[i] == 1).count();
        assert!(test_pos == 12 || test_pos == 13);
        assert_eq!(
            stratified_split_indices(&labels, 0.25, 7).unwrap(),
            (train, test)
        );
    }

    #[test]
    fn split_rejects_missing_class_and_bad_fraction() {
        assert_eq!(
            stratified_split_indices(&[1, 1, 1], 0.5, 0).unwrap_err(),
            Error::EmptyClass { label: 0 }
        );
        assert!(matches!(
            stratified_split_indices(&[0, 1], 1.0, 0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            stratified_split_indices(&[0], 0.5, 0),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn non_binary_labels_are_rejected() {
        assert_eq!(binary_labels(&[0.0, 1.0]).unwrap(), vec![0, 1]);
        assert_eq!(
            binary_labels(&[0.0, 2.0]).unwrap_err(),
            Error::NonBinaryLabel {
                index: 1,
                value: 2.0
            }
        );
    }
}
