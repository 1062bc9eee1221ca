use super::{write_atomic, IoError};
use crate::ode::{IntegratorConfig, StepStats, Trajectory};
use std::path::Path;

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A table cell; `None` is written as an empty field.
pub type Cell = Option<f64>;

/// Trajectory as CSV: header `T,<labels>`, one row per sample.
pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("T").chain(traj.labels.iter().map(String::as_str)))?;
    for (t, y) in traj.times.iter().zip(&traj.states) {
        w.write_record(std::iter::once(*t).chain(y.iter().copied()).map(format_f64))?;
    }
    w.into_inner()
        .map_err(|e| IoError::Csv(e.into_error().into()))
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), IoError> {
    write_atomic(path, &trajectory_csv(traj)?)
}

/// Generic numeric table with optional cells.
pub fn table_csv<S: AsRef<str>>(header: &[S], rows: &[Vec<Cell>]) -> Result<Vec<u8>, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(AsRef::as_ref))?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.map(format_f64).unwrap_or_default()))?;
    }
    w.into_inner()
        .map_err(|e| IoError::Csv(e.into_error().into()))
}

/// Table of preformatted text cells.
pub fn text_table_csv<S: AsRef<str>>(
    header: &[S],
    rows: &[Vec<String>],
) -> Result<Vec<u8>, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(AsRef::as_ref))?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| IoError::Csv(e.into_error().into()))
}

pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory, IoError> {
    let text = std::fs::read_to_string(path).map_err(IoError::at(path))?;
    parse_trajectory_csv(&text)
}

/// Parses a trajectory CSV, checking the header, row widths, that every
/// field is a number and that time strictly increases.
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, IoError> {
    let schema = |m: String| IoError::Schema(m);
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("T") {
        return Err(schema("first column must be `T`".into()));
    }
    if header.len() < 2 {
        return Err(schema("no state columns".into()));
    }
    let labels = header[1..].to_vec();
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != header.len() {
            return Err(schema(format!(
                "line {line}: {} fields, header has {}",
                rec.len(),
                header.len()
            )));
        }
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| schema(format!("line {line}: {e}")))?;
        if let Some(&prev) = times.last() {
            if !(row[0] > prev) {
                return Err(schema(format!("line {line}: time does not increase")));
            }
        }
        times.push(row[0]);
        states.push(row[1..].to_vec());
    }
    if times.is_empty() {
        return Err(schema("no data rows".into()));
    }
    let config = IntegratorConfig {
        t_end: *times.last().unwrap(),
        ..IntegratorConfig::default()
    };
    Ok(Trajectory {
        times,
        states,
        labels,
        config,
        stats: StepStats::default(),
    })
}
