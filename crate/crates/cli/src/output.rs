use crate::error::CliError;
use masersim_core::io::{format_f64, text_table_csv, trajectory_csv, write_atomic, Manifest};
use masersim_core::sweep::{RunRecord, RunStatus, SweepOutcome, SweepSpec};
use serde::Serialize;
use std::path::Path;

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Collects the files of one invocation so the manifest can list them.
pub struct OutputSet<'a> {
    pub dir: &'a Path,
    pub files: Vec<String>,
}

impl<'a> OutputSet<'a> {
    pub fn new(dir: &'a Path) -> Self {
        Self {
            dir,
            files: Vec::new(),
        }
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.dir.join(rel), bytes)?;
        self.files.push(rel.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.write(rel, &bytes)
    }
}

/// Per-record trajectory CSV and analysis JSON plus the sweep summary.
/// Sets `trajectory_file` on every record that has a trajectory.
pub fn write_records(
    out: &mut OutputSet<'_>,
    spec: &SweepSpec,
    records: &mut [RunRecord],
    single: bool,
) -> Result<(), CliError> {
    for r in records.iter_mut() {
        let (csv_name, json_name) = if single {
            ("trajectory.csv".to_string(), "analysis.json".to_string())
        } else {
            (
                format!("runs/run-{:03}.csv", r.index),
                format!("runs/run-{:03}.analysis.json", r.index),
            )
        };
        if let Some(traj) = &r.trajectory {
            out.write(&csv_name, &trajectory_csv(traj)?)?;
            r.trajectory_file = Some(csv_name);
        }
        out.write_json(&json_name, &r.analyses)?;
    }
    if !single {
        out.write("summary.csv", &summary_csv(spec, records)?)?;
    }
    Ok(())
}

pub fn write_manifest(
    out: &mut OutputSet<'_>,
    spec: &SweepSpec,
    outcome: SweepOutcome,
    started_at: String,
) -> Result<Manifest, CliError> {
    let mut m = Manifest::new(spec, outcome.records);
    m.started_at = started_at;
    m.finished_at = now();
    m.outputs = out.files.clone();
    m.outputs.push("manifest.json".into());
    m.write(&out.dir.join("manifest.json"))?;
    Ok(m)
}

fn cell(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

pub fn summary_csv(spec: &SweepSpec, records: &[RunRecord]) -> Result<Vec<u8>, CliError> {
    let mut header: Vec<String> = vec!["index".into(), "variant".into()];
    header.extend(spec.axes.iter().map(|a| a.name.clone()));
    header.extend(
        [
            "status",
            "peak_time",
            "peak_value",
            "fwhm",
            "leading_edge",
            "trailing_edge",
            "edge_ratio",
            "rise10_time",
            "pulse_count",
            "mean_period",
            "period_cv",
            "mean_total_outflow",
            "predicted_outflow",
            "conservation_drift",
            "growth_plateau",
            "growth_longest_run",
            "accepted_steps",
            "rejected_steps",
        ]
        .map(String::from),
    );
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let a = &r.analyses;
            let pm = a.pulse_metrics;
            let tr = a.pulse_train.as_ref();
            let mut row = vec![r.index.to_string(), r.variant.to_string()];
            row.extend(r.axis_values.iter().map(|v| format_f64(v.value)));
            row.push(match &r.status {
                RunStatus::Ok => "ok".into(),
                RunStatus::Failed { .. } => "failed".into(),
            });
            row.extend([
                cell(pm.map(|m| m.peak_time)),
                cell(pm.map(|m| m.peak_value)),
                cell(pm.map(|m| m.fwhm)),
                cell(pm.map(|m| m.leading_edge)),
                cell(pm.map(|m| m.trailing_edge)),
                cell(pm.map(|m| m.edge_ratio)),
                cell(pm.and_then(|m| m.rise10_time)),
                tr.map(|t| t.peak_times.len().to_string())
                    .unwrap_or_default(),
                cell(tr.map(|t| t.mean_period)),
                cell(tr.map(|t| t.period_cv)),
                cell(a.outflow.map(|o| o.measured.mean_total_outflow)),
                cell(a.outflow.and_then(|o| o.predicted_total)),
                cell(a.conservation_drift),
                cell(a.growth.and_then(|g| g.plateau)),
                cell(a.growth.map(|g| g.longest_run)),
                r.stats.accepted.to_string(),
                r.stats.rejected.to_string(),
            ]);
            row
        })
        .collect();
    Ok(text_table_csv(&header, &rows)?)
}
