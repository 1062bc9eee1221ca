//! Small-dimension initial-value-problem integration with dense sampling.
//!
//! Two methods are provided: an embedded Dormand–Prince 5(4) pair with PI
//! step-size control, and classical fixed-step RK4. Both are written against
//! the [`VectorField`] trait and produce a [`Trajectory`] sampled on a uniform
//! grid of spacing `sample_interval`, independent of the internal steps.

mod dopri5;
mod log_derivative;
mod rk4;
mod sampling;

pub use log_derivative::{derivative_of_log, log_derivative};

/// Sample times, sampled states and step counts of one integration.
pub(crate) type Samples = (Vec<f64>, Vec<Vec<f64>>, StepStats);

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Right-hand side of an autonomous or time-dependent ODE system.
///
/// `eval` must be a pure function of `(t, y)`.
pub trait VectorField {
    fn dimension(&self) -> usize;

    fn labels(&self) -> Vec<String>;

    /// Writes `dy/dt` evaluated at `(t, y)` into `dydt`.
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn labels(&self) -> Vec<String> {
        (**self).labels()
    }
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        (**self).eval(t, y, dydt)
    }
}

/// A vector field backed by a closure. Handy for tests and ad-hoc systems.
pub struct FnField<F> {
    labels: Vec<String>,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, f: F) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
            f,
        }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dimension(&self) -> usize {
        self.labels.len()
    }
    fn labels(&self) -> Vec<String> {
        self.labels.clone()
    }
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        (self.f)(t, y, dydt)
    }
}

/// Wraps a field so that it is integrated in a rescaled time variable
/// `s = t * factor`, i.e. `dy/ds = f(s / factor, y) / factor`.
pub struct RescaledTime<F> {
    inner: F,
    factor: f64,
}

impl<F: VectorField> RescaledTime<F> {
    pub fn new(inner: F, factor: f64) -> Self {
        Self { inner, factor }
    }
}

impl<F: VectorField> VectorField for RescaledTime<F> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn labels(&self) -> Vec<String> {
        self.inner.labels()
    }
    fn eval(&self, s: f64, y: &[f64], dydt: &mut [f64]) {
        self.inner.eval(s / self.factor, y, dydt);
        let inv = 1.0 / self.factor;
        dydt.iter_mut().for_each(|d| *d *= inv);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "adaptive-rk45")]
    AdaptiveRk45,
    #[serde(rename = "fixed-rk4")]
    FixedRk4,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adaptive-rk45" | "rk45" | "dopri5" => Ok(Method::AdaptiveRk45),
            "fixed-rk4" | "rk4" => Ok(Method::FixedRk4),
            other => Err(format!("unknown integration method `{other}`")),
        }
    }
}

/// Omitted fields take their [`Default`] values when deserializing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// First trial step for the adaptive method; the exact step for RK4.
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: u64,
    pub t_end: f64,
    /// Spacing of the dense output grid.
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::AdaptiveRk45,
            rel_tol: 1e-10,
            abs_tol: 1e-20,
            initial_step: 1e-4,
            max_step: 0.5,
            max_steps: 50_000_000,
            t_end: 20.0,
            sample_interval: 0.01,
        }
    }
}

impl IntegratorConfig {
    /// The fixed-step RK4 twin of this configuration with step `h`.
    pub fn as_rk4(&self, h: f64) -> Self {
        Self {
            method: Method::FixedRk4,
            initial_step: h,
            max_step: self.max_step.max(h),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(OdeError::InvalidConfig(what.to_string()))
            }
        };
        check(positive(self.rel_tol), "rel_tol must be > 0")?;
        check(positive(self.abs_tol), "abs_tol must be > 0")?;
        check(positive(self.initial_step), "initial_step must be > 0")?;
        check(
            positive(self.max_step) && self.initial_step <= self.max_step,
            "max_step must satisfy 0 < initial_step <= max_step",
        )?;
        check(self.max_steps > 0, "max_steps must be positive")?;
        check(positive(self.t_end), "t_end must be > 0")?;
        check(
            positive(self.sample_interval),
            "sample_interval must be > 0",
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

/// Time-ordered state samples produced by [`integrate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub config: IntegratorConfig,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// Copies one component out as a column.
    pub fn component(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.component_index(name)?;
        Some(self.column(idx))
    }

    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[idx]).collect()
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("initial state has length {got}, field dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state or derivative became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("exceeded {max_steps} steps before reaching t_end (stopped at t = {t})")]
    MaxStepsExceeded { max_steps: u64, t: f64 },
    #[error("trajectory has no component named `{0}`")]
    UnknownComponent(String),
    #[error("component `{component}` is not strictly positive (at t = {t})")]
    NonPositiveComponent { component: String, t: f64 },
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
}

/// Integrates `field` from `t = 0` to `cfg.t_end` starting at `y0`.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    y0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    let dim = field.dimension();
    if y0.len() != dim {
        return Err(OdeError::DimensionMismatch {
            expected: dim,
            got: y0.len(),
        });
    }
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteState { t: 0.0 });
    }
    let grid = sampling::SampleGrid::new(cfg.t_end, cfg.sample_interval);
    let (times, states, stats) = match cfg.method {
        Method::AdaptiveRk45 => dopri5::run(field, y0, cfg, &grid)?,
        Method::FixedRk4 => rk4::run(field, y0, cfg, &grid)?,
    };
    Ok(Trajectory {
        times,
        states,
        labels: field.labels(),
        config: cfg.clone(),
        stats,
    })
}
