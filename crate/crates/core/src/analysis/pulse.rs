use super::{component, parabolic_peak, AnalysisError};
use crate::ode::Trajectory;
use serde::{Deserialize, Serialize};

/// Shape descriptors of a single pulse.
///
/// Edges are measured from the half-maximum crossings nearest the peak, so
/// `fwhm == leading_edge + trailing_edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseMetrics {
    pub peak_time: f64,
    pub peak_value: f64,
    pub fwhm: f64,
    /// Last upward half-max crossing to peak.
    pub leading_edge: f64,
    /// Peak to next downward half-max crossing.
    pub trailing_edge: f64,
    pub edge_ratio: f64,
    /// Last upward crossing of 10 % of peak to peak; absent if the signal
    /// starts above that level.
    pub rise10_time: Option<f64>,
}

impl PulseMetrics {
    /// Re-expresses times in a unit where `t' = t * factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            peak_time: self.peak_time * factor,
            fwhm: self.fwhm * factor,
            leading_edge: self.leading_edge * factor,
            trailing_edge: self.trailing_edge * factor,
            rise10_time: self.rise10_time.map(|r| r * factor),
            ..*self
        }
    }
}

pub fn pulse_metrics(traj: &Trajectory, name: &str) -> Result<PulseMetrics, AnalysisError> {
    let values = component(traj, name)?;
    pulse_metrics_series(&traj.times, &values)
}

pub fn pulse_metrics_series(t: &[f64], x: &[f64]) -> Result<PulseMetrics, AnalysisError> {
    let n = x.len();
    if n < 3 || t.len() != n {
        return Err(AnalysisError::NoPulse("fewer than three samples".into()));
    }
    let (mut imax, mut xmax, mut xmin) = (0, x[0], x[0]);
    for (i, &v) in x.iter().enumerate() {
        if v > xmax {
            imax = i;
            xmax = v;
        }
        xmin = xmin.min(v);
    }
    if !(xmax > xmin) {
        return Err(AnalysisError::NoPulse("signal is flat".into()));
    }
    if imax == 0 || imax == n - 1 {
        return Err(AnalysisError::NoPulse(
            "maximum lies on the boundary of the time window".into(),
        ));
    }
    if !(xmax > 0.0) {
        return Err(AnalysisError::NoPulse("peak is not positive".into()));
    }

    let (peak_time, peak_value) = parabolic_peak(
        [t[imax - 1], t[imax], t[imax + 1]],
        [x[imax - 1], x[imax], x[imax + 1]],
    )
    .unwrap_or((t[imax], xmax));
    let half = 0.5 * peak_value;

    let t_left = crossing_before(t, x, imax, half)
        .ok_or_else(|| AnalysisError::NoPulse("signal starts above half maximum".into()))?;
    let t_right = crossing_after(t, x, imax, half)
        .ok_or(AnalysisError::UnboundedPulse { t_end: t[n - 1] })?;
    let rise10 =
        crossing_before(t, x, imax, 0.1 * peak_value).map(|t10| (peak_time - t10).max(0.0));

    let leading_edge = (peak_time - t_left).max(0.0);
    let trailing_edge = (t_right - peak_time).max(0.0);
    let edge_ratio = if leading_edge > 0.0 {
        trailing_edge / leading_edge
    } else {
        f64::INFINITY
    };
    Ok(PulseMetrics {
        peak_time,
        peak_value,
        fwhm: leading_edge + trailing_edge,
        leading_edge,
        trailing_edge,
        edge_ratio,
        rise10_time: rise10,
    })
}

/// Nearest time before `peak` where the signal rises through `level`.
fn crossing_before(t: &[f64], x: &[f64], peak: usize, level: f64) -> Option<f64> {
    (0..peak)
        .rev()
        .find(|&j| x[j] < level)
        .map(|j| lerp_crossing(t[j], x[j], t[j + 1], x[j + 1], level))
}

/// Nearest time after `peak` where the signal falls through `level`.
fn crossing_after(t: &[f64], x: &[f64], peak: usize, level: f64) -> Option<f64> {
    (peak + 1..x.len())
        .find(|&k| x[k] < level)
        .map(|k| lerp_crossing(t[k - 1], x[k - 1], t[k], x[k], level))
}

fn lerp_crossing(t0: f64, x0: f64, t1: f64, x1: f64, level: f64) -> f64 {
    t0 + (level - x0) * (t1 - t0) / (x1 - x0)
}
