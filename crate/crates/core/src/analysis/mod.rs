//! Observables extracted from trajectories: single-pulse shape, periodic
//! trains, time-averaged radiation outflow, conservation drift and
//! log-growth curves.

mod conservation;
mod flux;
mod growth;
mod pulse;
mod train;

pub use conservation::{conserved_quantities, conserved_quantity_drift, ConservedQuantity};
pub use flux::{outflow_window, time_averaged_outflow, FluxSummary};
pub use growth::{growth_summary, longest_interval_at_or_above, sustained_level, GrowthSummary};
pub use pulse::{pulse_metrics, pulse_metrics_series, PulseMetrics};
pub use train::{detect_pulse_train, detect_pulse_train_series, PulseTrain};

use crate::ode::OdeError;
use thiserror::Error;

/// Default minimum prominence, as a fraction of the signal range, for a
/// local maximum to count as a pulse.
pub const DEFAULT_PROMINENCE_FRAC: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("trajectory has no component named `{0}`")]
    UnknownComponent(String),
    #[error("no pulse: {0}")]
    NoPulse(String),
    #[error("pulse does not fall back below half maximum before t = {t_end}; extend t_end")]
    UnboundedPulse { t_end: f64 },
    #[error("found {0} peak(s); at least two are needed to measure a period")]
    FewerThanTwoPeaks(usize),
    #[error("prominence fraction must lie in (0, 1), got {0}")]
    InvalidProminence(f64),
    #[error("averaging window [{0}, {1}] is empty")]
    EmptyWindow(f64, f64),
    #[error("averaging window [{start}, {end}] exceeds trajectory span [{t0}, {t1}]")]
    WindowOutOfRange {
        start: f64,
        end: f64,
        t0: f64,
        t1: f64,
    },
    #[error("no conserved quantity: {0}")]
    NoConservedQuantity(String),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Vertex of the parabola through three samples, when it is a maximum
/// lying inside `[t0, t2]`.
pub(crate) fn parabolic_peak(t: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (u0, u2) = (t[0] - t[1], t[2] - t[1]);
    let (d0, d2) = (y[0] - y[1], y[2] - y[1]);
    // y = y1 + b·u + a·u², fitted through (u0, d0) and (u2, d2)
    let denom = u0 * u2 * (u0 - u2);
    if denom == 0.0 {
        return None;
    }
    let a = (d0 * u2 - d2 * u0) / denom;
    let b = (d2 * u0 * u0 - d0 * u2 * u2) / denom;
    if !(a < 0.0) {
        return None;
    }
    let u = -b / (2.0 * a);
    if !(u >= u0 && u <= u2) {
        return None;
    }
    Some((t[1] + u, y[1] + b * u + a * u * u))
}

pub(crate) fn component(
    traj: &crate::ode::Trajectory,
    name: &str,
) -> Result<Vec<f64>, AnalysisError> {
    traj.component(name)
        .ok_or_else(|| AnalysisError::UnknownComponent(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex_recovered() {
        let f = |t: f64| 3.0 - 2.0 * (t - 0.37).powi(2);
        let t = [0.0, 0.5, 1.5];
        let (tp, yp) = parabolic_peak(t, t.map(f)).unwrap();
        assert!((tp - 0.37).abs() < 1e-12);
        assert!((yp - 3.0).abs() < 1e-12);
        assert!(parabolic_peak([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]).is_none());
    }
}
