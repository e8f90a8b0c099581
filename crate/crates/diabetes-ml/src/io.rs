//! CSV readers and writers for single-table datasets and for the
//! vitals/demographics pair.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use diabetes_core::dataset::binary_labels;
use diabetes_core::vitals::{Demographics, RawVitalsRecord, VisitDate};
use diabetes_core::Dataset;

use crate::error::{AppError, AppResult};

pub const PIMA_LABEL: &str = "Outcome";
pub const PIMA_FEATURES: [&str; 8] = [
    "Pregnancies",
    "Glucose",
    "BloodPressure",
    "SkinThickness",
    "Insulin",
    "BMI",
    "DiabetesPedigreeFunction",
    "Age",
];
/// Pima columns where 0 is physiologically impossible and means "not
/// measured".
pub const PIMA_ZERO_MISSING: [&str; 5] = [
    "Glucose",
    "BloodPressure",
    "SkinThickness",
    "Insulin",
    "BMI",
];

/// Which columns of a table become the label and the features.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSchema {
    pub label: String,
    /// Feature columns in dataset order; `None` takes every non-label column
    /// in file order.
    pub features: Option<Vec<String>>,
}

impl TableSchema {
    pub fn new(label: impl Into<String>, features: Vec<String>) -> Self {
        Self {
            label: label.into(),
            features: Some(features),
        }
    }

    pub fn all_features(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            features: None,
        }
    }

    pub fn pima() -> Self {
        Self::new(
            PIMA_LABEL,
            PIMA_FEATURES.iter().map(|s| s.to_string()).collect(),
        )
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn csv_error(err: csv::Error) -> AppError {
    AppError::Data(format!("malformed CSV: {err}"))
}

fn open(path: &Path) -> AppResult<File> {
    File::open(path).map_err(|e| AppError::io(path, e))
}

fn create(path: &Path) -> AppResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path, e))
}

/// Header positions of the requested columns.
fn locate(headers: &csv::StringRecord, names: &[&str]) -> AppResult<Vec<usize>> {
    names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| AppError::Data(format!("missing column `{name}`")))
        })
        .collect()
}

fn parse_number(cell: &str, row: usize, column: &str) -> AppResult<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(AppError::Data(format!(
            "row {row}, column `{column}`: cannot parse `{cell}` as a number"
        ))),
    }
}

/// Reads a header-first CSV table into a dataset, rows in file order.
pub fn read_csv_dataset<R: Read>(reader: R, schema: &TableSchema) -> AppResult<Dataset> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().all(str::is_empty) {
        return Err(AppError::Data("no data rows".into()));
    }
    let feature_names: Vec<String> = match &schema.features {
        Some(f) => f.clone(),
        None => headers
            .iter()
            .filter(|h| *h != schema.label)
            .map(str::to_string)
            .collect(),
    };
    if feature_names.is_empty() {
        return Err(AppError::Usage("schema selects no feature columns".into()));
    }
    let label_at = locate(&headers, &[schema.label.as_str()])?[0];
    let names: Vec<&str> = feature_names.iter().map(String::as_str).collect();
    let feature_at = locate(&headers, &names)?;

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = r + 1;
        for (&at, name) in feature_at.iter().zip(&names) {
            features.push(parse_number(record.get(at).unwrap_or(""), row, name)?);
        }
        raw_labels.push(parse_number(
            record.get(label_at).unwrap_or(""),
            row,
            &schema.label,
        )?);
    }
    if raw_labels.is_empty() {
        return Err(AppError::Data("no data rows".into()));
    }
    let labels = binary_labels(&raw_labels).map_err(|e| match e {
        diabetes_core::Error::NonBinaryLabel { index, value } => AppError::Data(format!(
            "row {}, column `{}`: label {value} is not 0 or 1",
            index + 1,
            schema.label
        )),
        other => other.into(),
    })?;
    Ok(Dataset::new(features, labels, feature_names)?)
}

pub fn load_csv_dataset(path: &Path, schema: &TableSchema) -> AppResult<Dataset> {
    read_csv_dataset(open(path)?, schema).map_err(|e| e.context(path.display()))
}

/// Writes feature columns followed by the label column. Values use the
/// shortest representation that reads back to the same `f64`.
pub fn write_dataset_csv<W: Write>(writer: W, data: &Dataset, label_name: &str) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push(label_name);
    w.write_record(&header).map_err(csv_error)?;
    for (row, label) in data.rows().zip(data.labels()) {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        cells.push(label.to_string());
        w.write_record(&cells).map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::Data(e.to_string()))
}

pub fn save_dataset_csv(path: &Path, data: &Dataset, label_name: &str) -> AppResult<()> {
    write_dataset_csv(create(path)?, data, label_name).map_err(|e| e.context(path.display()))
}

pub const VITALS_COLUMNS: [&str; 7] = [
    "patient_id",
    "visit_date",
    "weight",
    "height",
    "bmi",
    "systolic_bp",
    "diastolic_bp",
];
pub const DEMOGRAPHICS_COLUMNS: [&str; 4] = ["patient_id", "age", "gender", "label"];

fn parse_date(cell: &str, row: usize) -> AppResult<VisitDate> {
    let date = NaiveDate::parse_from_str(cell, "%Y-%m-%d").map_err(|_| {
        AppError::Data(format!(
            "row {row}, column `visit_date`: `{cell}` is not an ISO-8601 date"
        ))
    })?;
    let year = u16::try_from(date.year()).map_err(|_| {
        AppError::Data(format!("row {row}, column `visit_date`: year out of range"))
    })?;
    Ok(VisitDate {
        year,
        month: date.month() as u8,
        day: date.day() as u8,
    })
}

pub fn read_vitals<R: Read>(reader: R) -> AppResult<Vec<RawVitalsRecord>> {
    let mut rdr = csv_reader(reader);
    let at = locate(rdr.headers().map_err(csv_error)?, &VITALS_COLUMNS)?;
    let mut out = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = r + 1;
        let cell = |k: usize| record.get(at[k]).unwrap_or("");
        let num = |k: usize| parse_number(cell(k), row, VITALS_COLUMNS[k]);
        out.push(RawVitalsRecord {
            patient_id: cell(0).to_string(),
            visit_date: parse_date(cell(1), row)?,
            weight: num(2)?,
            height: num(3)?,
            bmi: num(4)?,
            systolic_bp: num(5)?,
            diastolic_bp: num(6)?,
        });
    }
    if out.is_empty() {
        return Err(AppError::Data("no data rows".into()));
    }
    Ok(out)
}

fn parse_flag(cell: &str, row: usize, column: &str, letters: [&str; 2]) -> AppResult<u8> {
    match cell {
        "0" => Ok(0),
        "1" => Ok(1),
        c if c.eq_ignore_ascii_case(letters[0]) => Ok(0),
        c if c.eq_ignore_ascii_case(letters[1]) => Ok(1),
        _ => Err(AppError::Data(format!(
            "row {row}, column `{column}`: expected 0 or 1, found `{cell}`"
        ))),
    }
}

pub fn read_demographics<R: Read>(reader: R) -> AppResult<Vec<Demographics>> {
    let mut rdr = csv_reader(reader);
    let at = locate(rdr.headers().map_err(csv_error)?, &DEMOGRAPHICS_COLUMNS)?;
    let mut out = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = r + 1;
        let cell = |k: usize| record.get(at[k]).unwrap_or("");
        out.push(Demographics {
            patient_id: cell(0).to_string(),
            age: parse_number(cell(1), row, "age")?,
            gender: parse_flag(cell(2), row, "gender", ["M", "F"])?,
            label: parse_flag(cell(3), row, "label", ["no", "yes"])?,
        });
    }
    if out.is_empty() {
        return Err(AppError::Data("no data rows".into()));
    }
    Ok(out)
}

pub fn load_vitals(path: &Path) -> AppResult<Vec<RawVitalsRecord>> {
    read_vitals(open(path)?).map_err(|e| e.context(path.display()))
}

pub fn load_demographics(path: &Path) -> AppResult<Vec<Demographics>> {
    read_demographics(open(path)?).map_err(|e| e.context(path.display()))
}

pub fn write_vitals<W: Write>(writer: W, records: &[RawVitalsRecord]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(VITALS_COLUMNS).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.patient_id.clone(),
            r.visit_date.to_string(),
            r.weight.to_string(),
            r.height.to_string(),
            r.bmi.to_string(),
            r.systolic_bp.to_string(),
            r.diastolic_bp.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::Data(e.to_string()))
}

pub fn write_demographics<W: Write>(writer: W, demographics: &[Demographics]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DEMOGRAPHICS_COLUMNS).map_err(csv_error)?;
    for d in demographics {
        w.write_record([
            d.patient_id.clone(),
            d.age.to_string(),
            d.gender.to_string(),
            d.label.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::Data(e.to_string()))
}

pub fn save_vitals(path: &Path, records: &[RawVitalsRecord]) -> AppResult<()> {
    write_vitals(create(path)?, records)
}

pub fn save_demographics(path: &Path, demographics: &[Demographics]) -> AppResult<()> {
    write_demographics(create(path)?, demographics)
}

/// Creates `path` (and its directory) for writing.
pub fn create_file(path: &Path) -> AppResult<BufWriter<File>> {
    create(path)
}
