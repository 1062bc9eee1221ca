//! Figure-specific datasets and plots layered on top of a preset sweep.

use crate::error::CliError;
use crate::output::OutputSet;
use masersim_core::io::{format_f64, table_csv, Cell, LineChart};
use masersim_core::sweep::{compare_models, RunRecord, TimeBase};
use serde::Serialize;

const OUTFLOW_TOLERANCE: f64 = 0.10;

pub fn write_extras(
    name: &str,
    records: &[RunRecord],
    out: &mut OutputSet<'_>,
) -> Result<(), CliError> {
    match name {
        "fig1" => growth_curves(records, out),
        "fig2" | "fig3" | "fig4" | "fig5" => comparison(name, records, out),
        "fig6" | "fig7" => pulse_family(name, records, out),
        "fig8" => pulse_train(records, out),
        other => Err(CliError::UnknownPreset(other.to_string())),
    }
}

fn axis_label(r: &RunRecord) -> String {
    r.axis_values
        .iter()
        .map(|a| format!("{}={}", a.name, short(a.value)))
        .collect::<Vec<_>>()
        .join(",")
}

fn short(v: f64) -> String {
    if v.abs() >= 1e4 {
        format!("{v:.3e}")
    } else {
        format_f64(v)
    }
}

fn time_label(r: &RunRecord) -> &'static str {
    match r.time_base {
        TimeBase::Normalized => "T",
        TimeBase::Threshold => "s = T·√N0",
    }
}

fn series(r: &RunRecord, component: &str) -> Vec<(f64, f64)> {
    match &r.trajectory {
        Some(t) => t
            .component(component)
            .map(|v| t.times.iter().copied().zip(v).collect())
            .unwrap_or_default(),
        None => Vec::new(),
    }
}

fn growth_curves(records: &[RunRecord], out: &mut OutputSet<'_>) -> Result<(), CliError> {
    let curves: Vec<_> = records
        .iter()
        .filter_map(|r| Some((r, r.analyses.growth_curve.as_ref()?)))
        .collect();
    let Some((_, first)) = curves.first() else {
        return Ok(());
    };
    let mut header = vec!["T".to_string()];
    header.extend(curves.iter().map(|(r, _)| axis_label(r)));
    let rows: Vec<Vec<Cell>> = (0..first.len())
        .map(|i| {
            let mut row = vec![Some(first[i].0)];
            row.extend(curves.iter().map(|(_, c)| c.get(i).and_then(|p| p.1)));
            row
        })
        .collect();
    out.write("growth_curves.csv", &table_csv(&header, &rows)?)?;

    let mut chart =
        LineChart::new("Growth rate of the photon number", "T", "d ln N1/dT").log_y(true);
    for (r, c) in &curves {
        chart.add(
            axis_label(r),
            c.iter()
                .map(|&(t, g)| (t, g.map_or(f64::NAN, f64::exp)))
                .collect(),
        );
    }
    out.write("fig1.svg", chart.render().as_bytes())
}

#[derive(Serialize)]
struct ComparisonSummary {
    columns: Vec<String>,
    theta: f64,
    n0: f64,
    max_inversion_divergence: f64,
    max_photon_divergence: f64,
}

fn comparison(name: &str, records: &[RunRecord], out: &mut OutputSet<'_>) -> Result<(), CliError> {
    let [a, b] = records else {
        return Err(CliError::Analysis(format!("{name} expects a pair of runs")));
    };
    let c = compare_models(a, b)?;
    let rows: Vec<Vec<Cell>> = c
        .rows
        .iter()
        .map(|r| r.iter().copied().map(Some).collect())
        .collect();
    out.write("overlay.csv", &table_csv(&c.columns, &rows)?)?;
    out.write_json(
        "comparison.json",
        &ComparisonSummary {
            columns: c.columns.clone(),
            theta: a.normalized.theta,
            n0: a.normalized.n0,
            max_inversion_divergence: c.max_inversion_divergence,
            max_photon_divergence: c.max_photon_divergence,
        },
    )?;

    let title = format!("N0 = {}, θ = {}", a.normalized.n0, a.normalized.theta);
    let mut inv = LineChart::new(format!("Inversion, {title}"), "T", "M");
    inv.add(
        format!("{} M1", a.variant),
        series(a, a.variant.inversion_component()),
    );
    inv.add(
        format!("{} M", b.variant),
        series(b, b.variant.inversion_component()),
    );
    out.write(&format!("{name}_inversion.svg"), inv.render().as_bytes())?;

    let mut ph = LineChart::new(format!("Photons, {title}"), "T", "N");
    for r in [a, b] {
        for comp in r.variant.photon_components() {
            ph.add(format!("{} {comp}", r.variant), series(r, comp));
        }
    }
    out.write(&format!("{name}_photons.svg"), ph.render().as_bytes())
}

fn pulse_family(
    name: &str,
    records: &[RunRecord],
    out: &mut OutputSet<'_>,
) -> Result<(), CliError> {
    let header = ["mu0", "fwhm", "leading", "trailing", "edge_ratio"];
    let rows: Vec<Vec<Cell>> = records
        .iter()
        .map(|r| {
            let m = r.analyses.pulse_metrics;
            vec![
                Some(r.physical.mu0),
                m.map(|m| m.fwhm),
                m.map(|m| m.leading_edge),
                m.map(|m| m.trailing_edge),
                m.map(|m| m.edge_ratio),
            ]
        })
        .collect();
    out.write("metrics_table.csv", &table_csv(&header, &rows)?)?;

    let x = records.first().map(time_label).unwrap_or("T");
    let delta = records.first().map_or(0.0, |r| r.physical.delta);
    let mut chart = LineChart::new(format!("Coherent pulses, δ = {delta}"), x, "N_c");
    for r in records {
        chart.add(format!("μ0 = {}", short(r.physical.mu0)), series(r, "N_c"));
    }
    out.write(&format!("{name}.svg"), chart.render().as_bytes())
}

#[derive(Serialize)]
struct OutflowSummary {
    window_start: f64,
    window_end: f64,
    measured_total: f64,
    measured_coherent: f64,
    measured_incoherent: f64,
    predicted_total: Option<f64>,
    relative_error: Option<f64>,
    tolerance: f64,
    within_tolerance: Option<bool>,
    pulse_count: usize,
    mean_period: Option<f64>,
    predicted_period: Option<f64>,
}

fn pulse_train(records: &[RunRecord], out: &mut OutputSet<'_>) -> Result<(), CliError> {
    let Some(r) = records.first() else {
        return Ok(());
    };
    let a = &r.analyses;
    if let Some(o) = a.outflow {
        let rel = o
            .predicted_total
            .map(|p| (o.measured.mean_total_outflow - p).abs() / p);
        out.write_json(
            "outflow.json",
            &OutflowSummary {
                window_start: o.measured.window_start,
                window_end: o.measured.window_end,
                measured_total: o.measured.mean_total_outflow,
                measured_coherent: o.measured.mean_coherent_outflow,
                measured_incoherent: o.measured.mean_incoherent_outflow,
                predicted_total: o.predicted_total,
                relative_error: rel,
                tolerance: OUTFLOW_TOLERANCE,
                within_tolerance: rel.map(|e| e <= OUTFLOW_TOLERANCE),
                pulse_count: a.pulse_train.as_ref().map_or(0, |t| t.peak_times.len()),
                mean_period: a.pulse_train.as_ref().map(|t| t.mean_period),
                predicted_period: a.predicted_period,
            },
        )?;
    }
    let np = r.normalized;
    let mut chart = LineChart::new(
        format!("Pulsating regime, Γ̃ = {}, θ = {}", np.gamma_tilde, np.theta),
        time_label(r),
        "normalized number",
    );
    for comp in ["M", "N_c"] {
        chart.add(comp, series(r, comp));
    }
    out.write("fig8.svg", chart.render().as_bytes())
}
