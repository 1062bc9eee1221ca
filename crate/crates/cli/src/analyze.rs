//! Post-hoc analysis of a trajectory CSV written by `simulate` or `figure`.

use crate::error::CliError;
use crate::output::OutputSet;
use clap::Args;
use masersim_core::io::read_trajectory_csv;
use masersim_core::models::{ModelVariant, NormalizedParams};
use masersim_core::ode::Trajectory;
use masersim_core::sweep::{
    analyze_trajectory, AnalysisContext, AnalysisKind, AnalysisOptions, AnalysisResults,
};
use std::path::PathBuf;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Trajectory CSV (`T` column followed by model components).
    pub trajectory: PathBuf,

    #[arg(long)]
    pub pulse_metrics: bool,
    #[arg(long)]
    pub pulse_train: bool,
    #[arg(long)]
    pub outflow: bool,
    #[arg(long)]
    pub conservation: bool,
    #[arg(long)]
    pub growth_curve: bool,

    /// Needed to tell puls-norm from sep-norm; otherwise inferred from the header.
    #[arg(long)]
    pub variant: Option<ModelVariant>,
    #[arg(long = "N0")]
    pub n0: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long = "gamma-tilde")]
    pub gamma_tilde: Option<f64>,
    #[arg(long = "I0")]
    pub i0: Option<f64>,
    #[arg(long)]
    pub source_factor: Option<f64>,
    /// Time units per unit of T in the file (√N0 for the threshold base).
    #[arg(long, default_value_t = 1.0)]
    pub time_factor: f64,
    #[arg(long)]
    pub prominence: Option<f64>,
    #[arg(long)]
    pub settle: Option<f64>,

    /// Also write the result as `analysis.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn infer_variant(labels: &[String]) -> Option<ModelVariant> {
    let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
    [
        ModelVariant::TradNorm,
        ModelVariant::TradDim,
        ModelVariant::SepDim,
        ModelVariant::SepNorm,
    ]
    .into_iter()
    .find(|v| v.labels() == labels.as_slice())
}

impl AnalyzeArgs {
    fn kinds(&self) -> Vec<AnalysisKind> {
        [
            (self.pulse_metrics, AnalysisKind::PulseMetrics),
            (self.growth_curve, AnalysisKind::GrowthCurve),
            (self.pulse_train, AnalysisKind::PulseTrain),
            (self.outflow, AnalysisKind::Outflow),
            (self.conservation, AnalysisKind::Conservation),
        ]
        .into_iter()
        .filter_map(|(on, k)| on.then_some(k))
        .collect()
    }

    fn params(&self) -> NormalizedParams {
        let d = NormalizedParams::default();
        NormalizedParams {
            n0: self.n0.unwrap_or(d.n0),
            theta: self.theta.unwrap_or(d.theta),
            i0: self.i0.unwrap_or(d.i0),
            gamma_tilde: self.gamma_tilde.unwrap_or(d.gamma_tilde),
            spontaneous_source_factor: self.source_factor.unwrap_or(d.spontaneous_source_factor),
        }
    }

    fn context(&self, traj: &Trajectory) -> Result<AnalysisContext, CliError> {
        let inferred = infer_variant(&traj.labels).ok_or_else(|| {
            CliError::Schema(format!("columns {:?} match no model variant", traj.labels))
        })?;
        let variant = match self.variant {
            None => inferred,
            Some(v) if v.labels() == inferred.labels() => v,
            Some(v) => {
                return Err(CliError::Schema(format!(
                    "columns {:?} do not belong to {v}",
                    traj.labels
                )))
            }
        };
        if !(self.time_factor > 0.0 && self.time_factor.is_finite()) {
            return Err(CliError::Config(format!(
                "--time-factor must be positive (got {})",
                self.time_factor
            )));
        }
        let params = self.params();
        params.validate()?;
        let first = traj.states.first().map(|s| s.as_slice()).unwrap_or(&[]);
        let initial_inversion = if variant.is_normalized() {
            first.first().copied().unwrap_or(1.0)
        } else {
            // Dimensional inversion is its own scale.
            1.0
        };
        Ok(AnalysisContext {
            variant,
            params,
            time_factor: self.time_factor,
            initial_inversion,
        })
    }

    pub fn run(&self) -> Result<AnalysisResults, CliError> {
        let kinds = self.kinds();
        if kinds.is_empty() {
            return Err(CliError::Config(
                "no analysis requested (--pulse-metrics, --pulse-train, --outflow, --conservation, --growth-curve)"
                    .into(),
            ));
        }
        let traj = read_trajectory_csv(&self.trajectory)?;
        let ctx = self.context(&traj)?;
        let mut opts = AnalysisOptions {
            settle_time: self.settle,
            ..AnalysisOptions::default()
        };
        if let Some(p) = self.prominence {
            opts.prominence_frac = p;
        }
        let results = analyze_trajectory(&traj, &ctx, &opts, &kinds);
        if let Some(dir) = &self.out {
            OutputSet::new(dir).write_json("analysis.json", &results)?;
        }
        Ok(results)
    }
}
