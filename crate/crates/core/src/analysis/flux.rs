use super::{component, AnalysisError, PulseTrain};
use crate::ode::Trajectory;
use serde::{Deserialize, Serialize};

/// Time-averaged loss of photons through the boundary, `θ·⟨N⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxSummary {
    pub window_start: f64,
    pub window_end: f64,
    pub mean_coherent_outflow: f64,
    pub mean_incoherent_outflow: f64,
    pub mean_total_outflow: f64,
}

/// Averages `θ·N_c` and `θ·N_inc` over `[start, end]` with the trapezoid
/// rule on the sampled trajectory.
pub fn time_averaged_outflow(
    traj: &Trajectory,
    theta: f64,
    window: (f64, f64),
) -> Result<FluxSummary, AnalysisError> {
    let coherent = component(traj, "N_c")?;
    let incoherent = component(traj, "N_inc")?;
    let c = theta * trapezoid_mean(&traj.times, &coherent, window)?;
    let i = theta * trapezoid_mean(&traj.times, &incoherent, window)?;
    Ok(FluxSummary {
        window_start: window.0,
        window_end: window.1,
        mean_coherent_outflow: c,
        mean_incoherent_outflow: i,
        mean_total_outflow: c + i,
    })
}

/// Averaging window spanning a whole number of periods, first to last
/// detected peak; without a usable train, the second half of the run.
pub fn outflow_window(traj: &Trajectory, train: Option<&PulseTrain>) -> (f64, f64) {
    if let Some(tr) = train {
        if let (Some(&a), Some(&b)) = (tr.peak_times.first(), tr.peak_times.last()) {
            if b > a {
                return (a, b);
            }
        }
    }
    let t0 = traj.times.first().copied().unwrap_or(0.0);
    let t1 = traj.times.last().copied().unwrap_or(0.0);
    (0.5 * (t0 + t1), t1)
}

/// Mean of the piecewise-linear interpolant of `(t, x)` over `[a, b]`.
pub(crate) fn trapezoid_mean(
    t: &[f64],
    x: &[f64],
    (a, b): (f64, f64),
) -> Result<f64, AnalysisError> {
    if !(b > a) {
        return Err(AnalysisError::EmptyWindow(a, b));
    }
    let (t0, t1) = match (t.first(), t.last()) {
        (Some(&t0), Some(&t1)) if t.len() >= 2 => (t0, t1),
        _ => return Err(AnalysisError::EmptyWindow(a, b)),
    };
    let slack = 1e-9 * (t1 - t0).abs().max(1.0);
    if a < t0 - slack || b > t1 + slack {
        return Err(AnalysisError::WindowOutOfRange {
            start: a,
            end: b,
            t0,
            t1,
        });
    }
    let (a, b) = (a.max(t0), b.min(t1));
    let mut area = 0.0;
    for k in 0..t.len() - 1 {
        let (ta, tb) = (t[k], t[k + 1]);
        if tb <= a || ta >= b || tb <= ta {
            continue;
        }
        let (u0, u1) = (ta.max(a), tb.min(b));
        let at = |u: f64| x[k] + (x[k + 1] - x[k]) * (u - ta) / (tb - ta);
        area += 0.5 * (u1 - u0) * (at(u0) + at(u1));
    }
    Ok(area / (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{IntegratorConfig, StepStats};

    fn traj(f: impl Fn(f64) -> (f64, f64)) -> Trajectory {
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.1).collect();
        let states = times
            .iter()
            .map(|&t| {
                let (inc, c) = f(t);
                vec![1.0, inc, c]
            })
            .collect();
        Trajectory {
            times,
            states,
            labels: vec!["M".into(), "N_inc".into(), "N_c".into()],
            config: IntegratorConfig::default(),
            stats: StepStats::default(),
        }
    }

    #[test]
    fn constant_signal() {
        let tr = traj(|_| (0.25, 2.0));
        let s = time_averaged_outflow(&tr, 0.4, (13.37, 77.7)).unwrap();
        assert!((s.mean_coherent_outflow - 0.8).abs() < 1e-12);
        assert!((s.mean_incoherent_outflow - 0.1).abs() < 1e-12);
        assert!((s.mean_total_outflow - 0.9).abs() < 1e-12);
    }

    #[test]
    fn zero_loss_means_zero_outflow() {
        let tr = traj(|t| (t, t.sin() + 2.0));
        let s = time_averaged_outflow(&tr, 0.0, (0.0, 100.0)).unwrap();
        assert_eq!(s.mean_total_outflow, 0.0);
    }

    #[test]
    fn linear_signal_exact() {
        let t: Vec<f64> = vec![0.0, 0.3, 1.0, 2.5, 4.0];
        let x: Vec<f64> = t.iter().map(|s| 3.0 * s + 1.0).collect();
        let m = trapezoid_mean(&t, &x, (0.5, 3.1)).unwrap();
        assert!((m - (3.0 * 1.8 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn bad_windows() {
        let tr = traj(|_| (1.0, 1.0));
        assert!(matches!(
            time_averaged_outflow(&tr, 1.0, (5.0, 5.0)),
            Err(AnalysisError::EmptyWindow(..))
        ));
        assert!(matches!(
            time_averaged_outflow(&tr, 1.0, (5.0, 500.0)),
            Err(AnalysisError::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn window_from_train() {
        let tr = traj(|_| (1.0, 1.0));
        assert_eq!(outflow_window(&tr, None), (50.0, 100.0));
        let train = PulseTrain {
            peak_times: vec![3.0, 10.0, 17.0],
            peak_values: vec![1.0; 3],
            spacings: vec![7.0, 7.0],
            mean_period: 7.0,
            period_cv: 0.0,
            mean_peak_value: 1.0,
        };
        assert_eq!(outflow_window(&tr, Some(&train)), (3.0, 17.0));
    }
}
