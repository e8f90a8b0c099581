//! Longitudinal vitals records and their per-patient aggregation into a
//! fixed 17-slot feature vector: age, gender, then min/max/mean of each of
//! the five vital measures.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::MaskedDataset;
use crate::error::{Error, Result};

/// Calendar date of a visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VisitDate {
    pub year: u16,
    pub month: u8,
    pub day: u8,
}

impl fmt::Display for VisitDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// The five vital measures recorded at each visit, in feature order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Weight,
    Height,
    Bmi,
    SystolicBp,
    DiastolicBp,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Weight,
        Measure::Height,
        Measure::Bmi,
        Measure::SystolicBp,
        Measure::DiastolicBp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Weight => "weight",
            Measure::Height => "height",
            Measure::Bmi => "bmi",
            Measure::SystolicBp => "systolic_bp",
            Measure::DiastolicBp => "diastolic_bp",
        }
    }
}

/// One visit's vitals. A value of exactly 0 means "not recorded".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawVitalsRecord {
    pub patient_id: String,
    pub visit_date: VisitDate,
    pub weight: f64,
    pub height: f64,
    pub bmi: f64,
    pub systolic_bp: f64,
    pub diastolic_bp: f64,
}

impl RawVitalsRecord {
    pub fn measure(&self, m: Measure) -> f64 {
        match m {
            Measure::Weight => self.weight,
            Measure::Height => self.height,
            Measure::Bmi => self.bmi,
            Measure::SystolicBp => self.systolic_bp,
            Measure::DiastolicBp => self.diastolic_bp,
        }
    }
}

/// Per-patient attributes that do not vary between visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    pub patient_id: String,
    pub age: f64,
    /// 0 = male, 1 = female.
    pub gender: u8,
    /// 1 = diabetic.
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl MeasureSummary {
    /// Summary of the non-missing (non-zero) values, `None` if there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values.into_iter().filter(|&v| v != 0.0) {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        // The clamp keeps min <= mean <= max exact despite rounding in the sum.
        (count > 0).then(|| Self {
            min,
            max,
            mean: (sum / count as f64).clamp(min, max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientFeatureVector {
    pub patient_id: String,
    pub age: f64,
    pub gender: u8,
    /// Indexed like [`Measure::ALL`]; `None` when the patient never had the
    /// measure recorded.
    pub summaries: [Option<MeasureSummary>; 5],
    pub label: u8,
}

pub const FEATURE_COUNT: usize = 17;

/// Column names of the aggregated feature vector.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    names.push("age".to_string());
    names.push("gender".to_string());
    for m in Measure::ALL {
        for stat in ["min", "max", "mean"] {
            names.push(alloc::format!("{}_{}", m.name(), stat));
        }
    }
    names
}

impl PatientFeatureVector {
    pub fn features(&self) -> [Option<f64>; FEATURE_COUNT] {
        let mut out = [None; FEATURE_COUNT];
        out[0] = Some(self.age);
        out[1] = Some(f64::from(self.gender));
        for (k, summary) in self.summaries.iter().enumerate() {
            if let Some(s) = summary {
                out[2 + 3 * k] = Some(s.min);
                out[3 + 3 * k] = Some(s.max);
                out[4 + 3 * k] = Some(s.mean);
            }
        }
        out
    }
}

fn validate_record(r: &RawVitalsRecord) -> Result<()> {
    for m in Measure::ALL {
        let v = r.measure(m);
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(
                "vitals",
                alloc::format!(
                    "patient `{}`: {} must be finite and >= 0, got {v}",
                    r.patient_id,
                    m.name()
                ),
            ));
        }
    }
    Ok(())
}

/// Aggregates each patient's visits into one feature vector, in the order of
/// `demographics`. Visits of patients absent from `demographics` are ignored.
pub fn aggregate_vitals(
    records: &[RawVitalsRecord],
    demographics: &[Demographics],
) -> Result<Vec<PatientFeatureVector>> {
    let mut visits: BTreeMap<&str, Vec<&RawVitalsRecord>> = BTreeMap::new();
    for r in records {
        validate_record(r)?;
        visits.entry(r.patient_id.as_str()).or_default().push(r);
    }
    demographics
        .iter()
        .map(|demo| {
            if demo.gender > 1 {
                return Err(Error::invalid(
                    "gender",
                    alloc::format!("patient `{}`: expected 0 or 1", demo.patient_id),
                ));
            }
            if demo.label > 1 {
                return Err(Error::NonBinaryLabel {
                    index: 0,
                    value: f64::from(demo.label),
                });
            }
            let rows = visits
                .get(demo.patient_id.as_str())
                .filter(|v| !v.is_empty())
                .ok_or_else(|| Error::NoVisits(demo.patient_id.clone()))?;
            let summaries =
                Measure::ALL.map(|m| MeasureSummary::of(rows.iter().map(|r| r.measure(m))));
            Ok(PatientFeatureVector {
                patient_id: demo.patient_id.clone(),
                age: demo.age,
                gender: demo.gender,
                summaries,
                label: demo.label,
            })
        })
        .collect()
}

/// Stacks patient vectors into a dataset; unrecorded measures become gaps.
pub fn to_dataset(patients: &[PatientFeatureVector]) -> Result<MaskedDataset> {
    if patients.is_empty() {
        return Err(Error::NoDataRows);
    }
    let mut cells = Vec::with_capacity(patients.len() * FEATURE_COUNT);
    for p in patients {
        cells.extend_from_slice(&p.features());
    }
    MaskedDataset::new(
        cells,
        patients.iter().map(|p| p.label).collect(),
        feature_names(),
    )
}
