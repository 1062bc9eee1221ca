//! Single-run configuration: a strict JSON document, overridden field by
//! field by command-line flags.

use crate::error::CliError;
use clap::Args;
use masersim_core::models::{ModelVariant, NormalizedParams, PhysicalParams};
use masersim_core::ode::{IntegratorConfig, Method};
use masersim_core::sweep::{AnalysisKind, InitialRule, ParamSet, SweepSpec, TimeBase};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const OUT_ENV: &str = "MASERSIM_OUT";
pub const DEFAULT_OUT_DIR: &str = "masersim-out";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    pub method: Option<Method>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
    pub max_steps: Option<u64>,
    pub t_end: Option<f64>,
    pub sample_interval: Option<f64>,
}

impl IntegratorOverrides {
    fn apply(&self, cfg: &mut IntegratorConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { cfg.$f = v; })*};
        }
        set!(
            method,
            rel_tol,
            abs_tol,
            initial_step,
            max_step,
            max_steps,
            t_end,
            sample_interval
        );
    }
}

/// Config file schema for `simulate`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub variant: Option<ModelVariant>,
    pub params: Option<ParamSet>,
    pub initial_state: Option<Vec<f64>>,
    #[serde(default)]
    pub integrator: IntegratorOverrides,
    pub time_base: Option<TimeBase>,
    pub analyses: Option<Vec<AnalysisKind>>,
    pub prominence_frac: Option<f64>,
    pub settle_time: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
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
    /// Spontaneous source factor of the split model (0.5 or 1.0).
    #[arg(long)]
    pub source_factor: Option<f64>,

    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long = "N-total")]
    pub n_total: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "Gamma")]
    pub gamma: Option<f64>,
    #[arg(long = "Nk0")]
    pub nk0: Option<f64>,

    /// normalized (T = μ0·τ) or threshold (s = T·√N0).
    #[arg(long, value_parser = parse_time_base)]
    pub time_base: Option<TimeBase>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub initial_step: Option<f64>,
    #[arg(long)]
    pub max_step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub sample_interval: Option<f64>,

    /// Initial state, comma separated, in the variant's component order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub initial: Option<Vec<f64>>,
    /// Comma-separated analyses: pulse_metrics, growth_curve, pulse_train,
    /// outflow, conservation.
    #[arg(long, value_delimiter = ',', value_parser = parse_analysis)]
    pub analyses: Option<Vec<AnalysisKind>>,
    #[arg(long)]
    pub prominence: Option<f64>,
    #[arg(long)]
    pub settle: Option<f64>,

    /// Output directory (beats MASERSIM_OUT, which beats the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_time_base(s: &str) -> Result<TimeBase, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown time base `{s}` (normalized, threshold)"))
}

pub fn parse_analysis(s: &str) -> Result<AnalysisKind, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| format!("unknown analysis `{s}`"))
}

/// Output directory precedence: flag, then environment, then file, then
/// the built-in default.
pub fn output_dir(flag: Option<&Path>, file: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    file.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl SimulateArgs {
    fn has_physical_flags(&self) -> bool {
        self.mu0.is_some()
            || self.n_total.is_some()
            || self.delta.is_some()
            || self.alpha.is_some()
            || self.gamma.is_some()
            || self.nk0.is_some()
    }

    fn normalized_only_flag(&self) -> Option<&'static str> {
        [
            ("--N0", self.n0.is_some()),
            ("--theta", self.theta.is_some()),
            ("--gamma-tilde", self.gamma_tilde.is_some()),
        ]
        .into_iter()
        .find_map(|(name, set)| set.then_some(name))
    }

    fn physical_flag(&self) -> Option<&'static str> {
        [
            ("--mu0", self.mu0.is_some()),
            ("--N-total", self.n_total.is_some()),
            ("--delta", self.delta.is_some()),
            ("--alpha", self.alpha.is_some()),
            ("--Gamma", self.gamma.is_some()),
            ("--Nk0", self.nk0.is_some()),
        ]
        .into_iter()
        .find_map(|(name, set)| set.then_some(name))
    }

    fn apply_params(&self, base: ParamSet) -> Result<ParamSet, CliError> {
        match base {
            ParamSet::Physical(mut p) => {
                if let Some(flag) = self.normalized_only_flag() {
                    return Err(CliError::Config(format!(
                        "{flag} is a normalized parameter but the run uses physical parameters"
                    )));
                }
                macro_rules! set {
                    ($($f:ident),*) => {$(if let Some(v) = self.$f { p.$f = v; })*};
                }
                set!(mu0, n_total, delta, alpha, gamma, nk0, i0);
                if let Some(v) = self.source_factor {
                    p.spontaneous_source_factor = v;
                }
                Ok(ParamSet::Physical(p))
            }
            ParamSet::Normalized(mut np) => {
                if let Some(flag) = self.physical_flag() {
                    return Err(CliError::Config(format!(
                        "{flag} is a physical parameter but the run uses normalized parameters"
                    )));
                }
                macro_rules! set {
                    ($($f:ident),*) => {$(if let Some(v) = self.$f { np.$f = v; })*};
                }
                set!(n0, theta, gamma_tilde, i0);
                if let Some(v) = self.source_factor {
                    np.spontaneous_source_factor = v;
                }
                Ok(ParamSet::Normalized(np))
            }
        }
    }

    /// Merges defaults, the config file and flags into a one-point sweep,
    /// returning it with the output directory.
    pub fn resolve(&self) -> Result<(SweepSpec, PathBuf), CliError> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let variant = self
            .variant
            .or(file.variant)
            .ok_or_else(|| CliError::Config("no model variant given (--variant)".into()))?;

        let base = match file.params.clone() {
            Some(p) => p,
            None if !variant.is_normalized() || self.has_physical_flags() => {
                ParamSet::Physical(PhysicalParams::default())
            }
            None => ParamSet::Normalized(NormalizedParams::default()),
        };
        let params = self.apply_params(base)?;
        let theta = match &params {
            ParamSet::Normalized(np) => np.theta,
            ParamSet::Physical(p) => p.delta / p.mu0,
        };
        let pulsating = variant == ModelVariant::PulsNorm;

        let mut integrator = IntegratorConfig {
            t_end: if pulsating { 400.0 } else { 20.0 },
            sample_interval: if pulsating { 0.05 } else { 0.01 },
            ..IntegratorConfig::default()
        };
        file.integrator.apply(&mut integrator);
        IntegratorOverrides {
            method: self.method,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            initial_step: self.initial_step,
            max_step: self.max_step,
            max_steps: self.max_steps,
            t_end: self.t_end,
            sample_interval: self.sample_interval,
        }
        .apply(&mut integrator);
        if integrator.max_step < integrator.initial_step {
            integrator.max_step = integrator.initial_step;
        }

        let mut spec = SweepSpec::single(variant, params, integrator);
        spec.time_base = self.time_base.or(file.time_base).unwrap_or_default();
        spec.initial_state = match self.initial.clone().or(file.initial_state.clone()) {
            Some(values) => InitialRule::Explicit { values },
            None if pulsating && theta > 0.0 => InitialRule::PulsatingPerturbed {
                relative_offset: 0.1,
            },
            None => InitialRule::Default,
        };
        spec.analyses = match self.analyses.clone().or(file.analyses.clone()) {
            Some(a) => a,
            None if pulsating && theta > 0.0 => {
                vec![AnalysisKind::PulseTrain, AnalysisKind::Outflow]
            }
            None => Vec::new(),
        };
        if let Some(v) = self.prominence.or(file.prominence_frac) {
            spec.prominence_frac = v;
        }
        spec.settle_time = self.settle.or(file.settle_time);
        spec.validate()?;

        let out = output_dir(self.out.as_deref(), file.output_dir.as_deref());
        Ok((spec, out))
    }
}
