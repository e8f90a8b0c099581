//! Metric tables with a fixed column order.

use std::io::Write;
use std::path::Path;

use diabetes_core::metrics::Metric;
use diabetes_core::MetricReport;

use crate::error::{AppError, AppResult};
use crate::io::create_file;

pub const MODEL_COLUMN: &str = "Model";
pub const SEED_COLUMN: &str = "seed";

/// Four decimals, `NA` for a metric whose denominator was zero.
pub fn format_metric(value: Option<f64>) -> String {
    value.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"))
}

pub fn header() -> Vec<String> {
    let mut h = vec![MODEL_COLUMN.to_string()];
    h.extend(Metric::ALL.iter().map(|m| m.title().to_string()));
    h.push(SEED_COLUMN.to_string());
    h
}

/// One table row as text cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub model: String,
    pub metrics: [String; 6],
    pub seed: String,
}

impl ReportRow {
    pub fn new(model: &str, report: &MetricReport, seed: u64) -> Self {
        Self {
            model: model.to_string(),
            metrics: report.values().map(format_metric),
            seed: seed.to_string(),
        }
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![self.model.clone()];
        c.extend(self.metrics.iter().cloned());
        c.push(self.seed.clone());
        c
    }
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> AppError {
    AppError::Data(format!("{}: {e}", path.display()))
}

/// Reads rows written by [`append_rows`] or [`write_rows`]. A missing file
/// reads as no rows.
pub fn read_rows(path: &Path) -> AppResult<Vec<ReportRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let found: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header() {
        return Err(AppError::Data(format!(
            "{}: unexpected header {found:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let cell = |i: usize| record.get(i).unwrap_or("").to_string();
        rows.push(ReportRow {
            model: cell(0),
            metrics: [cell(1), cell(2), cell(3), cell(4), cell(5), cell(6)],
            seed: cell(7),
        });
    }
    Ok(rows)
}

pub fn write_rows(path: &Path, rows: &[ReportRow]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    w.write_record(header()).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(r.cells()).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| csv_error(path, e))
}

/// Appends to a report CSV, creating it with a header when absent.
pub fn append_rows(path: &Path, rows: &[ReportRow]) -> AppResult<()> {
    let mut all = read_rows(path)?;
    all.extend_from_slice(rows);
    write_rows(path, &all)
}

/// Aligned plain-text rendering: names left-aligned, numbers right-aligned.
pub fn render_table(rows: &[ReportRow]) -> String {
    let head = header();
    let body: Vec<Vec<String>> = rows.iter().map(ReportRow::cells).collect();
    let widths: Vec<usize> = (0..head.len())
        .map(|c| {
            body.iter()
                .map(|r| r[c].len())
                .chain([head[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&head));
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> AppResult<()> {
    let mut f = create_file(path)?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| AppError::io(path, e))
}
