//! Declarative parameter sweeps: a [`SweepSpec`] expands into a grid of
//! runs that execute in parallel and come back in grid order.

mod compare;
mod presets;

pub use compare::{compare_models, ModelComparison};
pub use presets::{fig6_mu0_values, figure_preset, FIG1_N0_VALUES, PRESET_NAMES};

use crate::analysis::{
    self, conserved_quantity_drift, detect_pulse_train, growth_summary, outflow_window,
    pulse_metrics, time_averaged_outflow, AnalysisError, FluxSummary, GrowthSummary, PulseMetrics,
    PulseTrain,
};
use crate::models::{
    default_initial_state, normalize, perturbed_fixed_point, predicted_outflow,
    predicted_repetition_rate, InitialState, ModelError, ModelField, ModelVariant,
    NormalizedParams, PhysicalParams,
};
use crate::ode::{
    derivative_of_log, integrate, IntegratorConfig, OdeError, RescaledTime, StepStats, Trajectory,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

pub const DEFAULT_GRID_CAP: usize = 10_000;
pub const DEFAULT_REFERENCE_N_TOTAL: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("unknown preset `{0}` (expected one of fig1..fig8)")]
    UnknownPreset(String),
    #[error("grid has {size} points, above the cap of {cap}")]
    GridTooLarge { size: usize, cap: usize },
    #[error("`{name}` is not a parameter of the {base} parameter set")]
    UnknownAxis { name: String, base: &'static str },
    #[error("axis `{0}` has no values")]
    EmptyAxis(String),
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("records cannot be compared: {0}")]
    MismatchedGrids(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Parameter set a sweep starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSet {
    Physical(PhysicalParams),
    Normalized(NormalizedParams),
}

impl ParamSet {
    fn kind(&self) -> &'static str {
        match self {
            ParamSet::Physical(_) => "physical",
            ParamSet::Normalized(_) => "normalized",
        }
    }

    fn axis_names(&self) -> &'static [&'static str] {
        match self {
            ParamSet::Physical(_) => &[
                "N_total",
                "mu0",
                "delta",
                "alpha",
                "I0",
                "Gamma",
                "Nk0",
                "spontaneous_source_factor",
            ],
            ParamSet::Normalized(_) => &[
                "N0",
                "theta",
                "I0",
                "Gamma_tilde",
                "spontaneous_source_factor",
            ],
        }
    }

    fn with(&self, name: &str, v: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            ParamSet::Physical(p) => match name {
                "N_total" => p.n_total = v,
                "mu0" => p.mu0 = v,
                "delta" => p.delta = v,
                "alpha" => p.alpha = v,
                "I0" => p.i0 = v,
                "Gamma" => p.gamma = v,
                "Nk0" => p.nk0 = v,
                "spontaneous_source_factor" => p.spontaneous_source_factor = v,
                _ => unreachable!("axis names are validated"),
            },
            ParamSet::Normalized(np) => match name {
                "N0" => np.n0 = v,
                "theta" => np.theta = v,
                "I0" => np.i0 = v,
                "Gamma_tilde" => np.gamma_tilde = v,
                "spontaneous_source_factor" => np.spontaneous_source_factor = v,
                _ => unreachable!("axis names are validated"),
            },
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Unit of the integration variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeBase {
    /// `T = μ0·τ`.
    #[default]
    Normalized,
    /// `s = τ·√N = T·√N0`, time in units of the threshold scale.
    Threshold,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialRule {
    #[default]
    Default,
    /// Pulsating fixed point with `M` displaced by `relative_offset`.
    PulsatingPerturbed {
        relative_offset: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    PulseMetrics,
    GrowthCurve,
    PulseTrain,
    Outflow,
    Conservation,
}

fn default_reference_n_total() -> f64 {
    DEFAULT_REFERENCE_N_TOTAL
}
fn default_prominence() -> f64 {
    analysis::DEFAULT_PROMINENCE_FRAC
}
fn default_grid_cap() -> usize {
    DEFAULT_GRID_CAP
}
fn default_growth_window() -> f64 {
    1.0
}
fn default_growth_fraction() -> f64 {
    0.8
}
fn default_label() -> String {
    "custom".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Preset name, or "custom".
    #[serde(default = "default_label")]
    pub seed_label: String,
    /// Each variant is run over the whole parameter grid.
    pub variants: Vec<ModelVariant>,
    pub base_params: ParamSet,
    #[serde(default)]
    pub axes: Vec<Axis>,
    /// Emitter count used to recover `μ0` (and hence the physical set)
    /// from a normalized base.
    #[serde(default = "default_reference_n_total")]
    pub reference_n_total: f64,
    #[serde(default)]
    pub time_base: TimeBase,
    #[serde(default)]
    pub initial_state: InitialRule,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub analyses: Vec<AnalysisKind>,
    #[serde(default = "default_prominence")]
    pub prominence_frac: f64,
    /// Pulse-train detection ignores samples before this time.
    #[serde(default)]
    pub settle_time: Option<f64>,
    /// Window over which a growth plateau must hold.
    #[serde(default = "default_growth_window")]
    pub growth_window: f64,
    /// Growth-rate threshold as a fraction of the initial inversion.
    #[serde(default = "default_growth_fraction")]
    pub growth_rate_fraction: f64,
    #[serde(default = "default_grid_cap")]
    pub grid_cap: usize,
}

impl SweepSpec {
    /// A single-run spec with default analysis settings.
    pub fn single(
        variant: ModelVariant,
        base_params: ParamSet,
        integrator: IntegratorConfig,
    ) -> Self {
        Self {
            seed_label: default_label(),
            variants: vec![variant],
            base_params,
            axes: Vec::new(),
            reference_n_total: DEFAULT_REFERENCE_N_TOTAL,
            time_base: TimeBase::Normalized,
            initial_state: InitialRule::Default,
            integrator,
            analyses: Vec::new(),
            prominence_frac: default_prominence(),
            settle_time: None,
            growth_window: default_growth_window(),
            growth_rate_fraction: default_growth_fraction(),
            grid_cap: DEFAULT_GRID_CAP,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.axes.iter().fold(self.variants.len(), |acc, a| {
            acc.saturating_mul(a.values.len())
        })
    }

    /// Hex SHA-256 of the spec's JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn has(&self, kind: AnalysisKind) -> bool {
        self.analyses.contains(&kind)
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            prominence_frac: self.prominence_frac,
            settle_time: self.settle_time,
            growth_window: self.growth_window,
            growth_rate_fraction: self.growth_rate_fraction,
        }
    }

    /// Checks everything that can be checked without integrating.
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.variants.is_empty() {
            return Err(SweepError::InvalidSpec("no model variants given".into()));
        }
        let names = self.base_params.axis_names();
        for axis in &self.axes {
            if !names.contains(&axis.name.as_str()) {
                return Err(SweepError::UnknownAxis {
                    name: axis.name.clone(),
                    base: self.base_params.kind(),
                });
            }
            if axis.values.is_empty() {
                return Err(SweepError::EmptyAxis(axis.name.clone()));
            }
        }
        let size = self.grid_size();
        if size > self.grid_cap {
            return Err(SweepError::GridTooLarge {
                size,
                cap: self.grid_cap,
            });
        }
        self.integrator.validate()?;
        if !(self.reference_n_total > 0.0 && self.reference_n_total.is_finite()) {
            return Err(SweepError::InvalidSpec(
                "reference_n_total must be > 0".into(),
            ));
        }
        if !(self.prominence_frac > 0.0 && self.prominence_frac < 1.0) {
            return Err(AnalysisError::InvalidProminence(self.prominence_frac).into_spec());
        }
        if !(self.growth_window > 0.0) {
            return Err(SweepError::InvalidSpec("growth_window must be > 0".into()));
        }
        for plan in self.plans() {
            plan.resolve()?;
        }
        Ok(())
    }

    fn plans(&self) -> Vec<RunPlan<'_>> {
        let mut points: Vec<Vec<AxisValue>> = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(AxisValue {
                            name: axis.name.clone(),
                            value: v,
                        });
                        p
                    })
                })
                .collect();
        }
        self.variants
            .iter()
            .flat_map(|&variant| points.iter().map(move |p| (variant, p.clone())))
            .enumerate()
            .map(|(index, (variant, axis_values))| RunPlan {
                spec: self,
                index,
                variant,
                axis_values,
            })
            .collect()
    }
}

impl AnalysisError {
    fn into_spec(self) -> SweepError {
        SweepError::InvalidSpec(self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed { error: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutflowReport {
    pub measured: FluxSummary,
    /// Balance value `(Γ̃θ + N0)/2`, when it applies.
    pub predicted_total: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse_metrics: Option<PulseMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSummary>,
    /// `(t, ln(d ln N/dt))`, masked where the rate is not positive.
    #[serde(skip)]
    pub growth_curve: Option<Vec<(f64, Option<f64>)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse_train: Option<PulseTrain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outflow: Option<OutflowReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conservation_drift: Option<f64>,
    /// Failed analyses by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub errors: BTreeMap<String, String>,
}

/// One grid point: fully resolved inputs plus everything computed from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub variant: ModelVariant,
    pub axis_values: Vec<AxisValue>,
    pub physical: PhysicalParams,
    pub normalized: NormalizedParams,
    pub time_base: TimeBase,
    /// Integration time per unit of `T`.
    pub time_factor: f64,
    pub initial_state: Vec<f64>,
    pub integrator: IntegratorConfig,
    pub status: RunStatus,
    pub stats: StepStats,
    pub analyses: AnalysisResults,
    pub spec_hash: String,
    #[serde(default)]
    pub trajectory_file: Option<String>,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    /// The record with timing zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub spec_hash: String,
    pub records: Vec<RunRecord>,
}

struct RunPlan<'a> {
    spec: &'a SweepSpec,
    index: usize,
    variant: ModelVariant,
    axis_values: Vec<AxisValue>,
}

struct Resolved {
    physical: PhysicalParams,
    normalized: NormalizedParams,
    field: ModelField,
    initial: InitialState,
    time_factor: f64,
}

impl RunPlan<'_> {
    fn resolve(&self) -> Result<Resolved, SweepError> {
        let params = self
            .axis_values
            .iter()
            .fold(self.spec.base_params.clone(), |acc, av| {
                acc.with(&av.name, av.value)
            });
        let (physical, normalized) = match params {
            ParamSet::Physical(p) => (p, normalize(&p)?.params),
            ParamSet::Normalized(np) => {
                np.validate()?;
                (
                    PhysicalParams::from_normalized(&np, self.spec.reference_n_total),
                    np,
                )
            }
        };
        let field = if self.variant.is_normalized() {
            ModelField::from_normalized(self.variant, &normalized)?
        } else {
            ModelField::from_physical(self.variant, &physical)?
        };
        let initial = match &self.spec.initial_state {
            InitialRule::Default => default_initial_state(self.variant, &physical)?,
            InitialRule::PulsatingPerturbed { relative_offset } => {
                if self.variant != ModelVariant::PulsNorm {
                    return Err(SweepError::InvalidSpec(format!(
                        "pulsating_perturbed initial state needs puls-norm, not {}",
                        self.variant
                    )));
                }
                perturbed_fixed_point(&normalized, *relative_offset)?
            }
            InitialRule::Explicit { values } => InitialState::new(self.variant, values.clone())?,
        };
        let time_factor = match self.spec.time_base {
            TimeBase::Normalized => 1.0,
            TimeBase::Threshold => normalized.threshold_time_factor(),
        };
        Ok(Resolved {
            physical,
            normalized,
            field,
            initial,
            time_factor,
        })
    }

    fn execute(&self, spec_hash: &str) -> Result<RunRecord, SweepError> {
        let started = Instant::now();
        let r = self.resolve()?;
        let cfg = &self.spec.integrator;
        let result = if r.time_factor == 1.0 {
            integrate(&r.field, &r.initial.values, cfg)
        } else {
            integrate(
                &RescaledTime::new(&r.field, r.time_factor),
                &r.initial.values,
                cfg,
            )
        };
        let (status, stats, analyses, trajectory) = match result {
            Ok(traj) => {
                let analyses = self.analyze(&traj, &r);
                (RunStatus::Ok, traj.stats, analyses, Some(traj))
            }
            Err(e) => (
                RunStatus::Failed {
                    error: e.to_string(),
                },
                StepStats::default(),
                AnalysisResults::default(),
                None,
            ),
        };
        Ok(RunRecord {
            index: self.index,
            variant: self.variant,
            axis_values: self.axis_values.clone(),
            physical: r.physical,
            normalized: r.normalized,
            time_base: self.spec.time_base,
            time_factor: r.time_factor,
            initial_state: r.initial.values,
            integrator: cfg.clone(),
            status,
            stats,
            analyses,
            spec_hash: spec_hash.to_string(),
            trajectory_file: None,
            wall_time_s: started.elapsed().as_secs_f64(),
            trajectory,
        })
    }

    fn analyze(&self, traj: &Trajectory, r: &Resolved) -> AnalysisResults {
        let ctx = AnalysisContext {
            variant: self.variant,
            params: r.normalized,
            time_factor: r.time_factor,
            initial_inversion: if self.variant.is_normalized() {
                r.initial.values[0]
            } else {
                r.initial.values[1] / r.physical.mu0
            },
        };
        analyze_trajectory(
            traj,
            &ctx,
            &self.spec.analysis_options(),
            &self.spec.analyses,
        )
    }
}

/// Settings shared by the trajectory analyses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub prominence_frac: f64,
    pub settle_time: Option<f64>,
    pub growth_window: f64,
    pub growth_rate_fraction: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            prominence_frac: default_prominence(),
            settle_time: None,
            growth_window: default_growth_window(),
            growth_rate_fraction: default_growth_fraction(),
        }
    }
}

/// What the analyses need to know about the run behind a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisContext {
    pub variant: ModelVariant,
    pub params: NormalizedParams,
    /// Integration time per unit of `T`.
    pub time_factor: f64,
    /// Inversion at `t = 0` in units of `μ0`.
    pub initial_inversion: f64,
}

/// Runs the requested analyses on a trajectory. Failures are collected in
/// [`AnalysisResults::errors`] rather than returned.
pub fn analyze_trajectory(
    traj: &Trajectory,
    ctx: &AnalysisContext,
    opts: &AnalysisOptions,
    kinds: &[AnalysisKind],
) -> AnalysisResults {
    let has = |k| kinds.contains(&k);
    let pulse = ctx.variant.pulse_component();
    let mut out = AnalysisResults::default();
    let mut errors = BTreeMap::new();
    let mut fail = |name: &str, e: AnalysisError| {
        errors.insert(name.to_string(), e.to_string());
    };

    if has(AnalysisKind::PulseMetrics) {
        match pulse_metrics(traj, pulse) {
            Ok(m) => out.pulse_metrics = Some(m),
            Err(e) => fail("pulse_metrics", e),
        }
    }
    if has(AnalysisKind::GrowthCurve) {
        match derivative_of_log(traj, pulse) {
            Ok(curve) => {
                let threshold = opts.growth_rate_fraction * ctx.initial_inversion;
                out.growth = Some(growth_summary(&curve, opts.growth_window, threshold));
                out.growth_curve = Some(curve);
            }
            Err(e) => fail("growth_curve", e.into()),
        }
    }
    let mut train = None;
    if has(AnalysisKind::PulseTrain) || has(AnalysisKind::Outflow) {
        match detect_pulse_train(traj, pulse, opts.prominence_frac, opts.settle_time) {
            Ok(t) => train = Some(t),
            Err(e) if has(AnalysisKind::PulseTrain) => fail("pulse_train", e),
            Err(_) => {}
        }
    }
    if has(AnalysisKind::Outflow) {
        let window = outflow_window(traj, train.as_ref());
        match time_averaged_outflow(traj, ctx.params.theta, window) {
            Ok(measured) => {
                out.outflow = Some(OutflowReport {
                    measured,
                    predicted_total: predicted_outflow(&ctx.params).ok(),
                })
            }
            Err(e) => fail("outflow", e),
        }
    }
    if has(AnalysisKind::Conservation) {
        match conserved_quantity_drift(traj, ctx.variant, &ctx.params) {
            Ok(d) => out.conservation_drift = Some(d),
            Err(e) => fail("conservation", e),
        }
    }
    if has(AnalysisKind::PulseTrain) {
        out.pulse_train = train;
        if ctx.variant == ModelVariant::PulsNorm {
            let period = predicted_repetition_rate(&ctx.params).period;
            out.predicted_period = period.is_finite().then_some(period * ctx.time_factor);
        }
    }
    out.errors = errors;
    out
}

/// Runs every grid point of `spec`, on at most `jobs` threads (all cores
/// when `None`). Records come back in grid order whatever the thread count.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepOutcome, SweepError> {
    spec.validate()?;
    let spec_hash = spec.hash();
    let plans = spec.plans();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| SweepError::ThreadPool(e.to_string()))?;
    let records = pool.install(|| {
        plans
            .par_iter()
            .map(|plan| plan.execute(&spec_hash))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(SweepOutcome { spec_hash, records })
}
