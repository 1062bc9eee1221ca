use super::{OdeError, Trajectory};

/// Finite-difference estimate of `d(ln x)/dt` for one component.
///
/// Differences are taken on `ln x` rather than `x`: central at interior
/// samples, one-sided at the two ends.
pub fn log_derivative(traj: &Trajectory, component: &str) -> Result<Vec<(f64, f64)>, OdeError> {
    let values = traj
        .component(component)
        .ok_or_else(|| OdeError::UnknownComponent(component.to_string()))?;
    let t = &traj.times;
    if t.len() < 2 {
        return Err(OdeError::TooFewSamples(t.len()));
    }
    if let Some(i) = values.iter().position(|v| !(*v > 0.0)) {
        return Err(OdeError::NonPositiveComponent {
            component: component.to_string(),
            t: t[i],
        });
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let last = t.len() - 1;
    Ok((0..=last)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == last => (last - 1, last),
                i => (i - 1, i + 1),
            };
            (t[i], (logs[b] - logs[a]) / (t[b] - t[a]))
        })
        .collect())
}

/// `ln(x⁻¹ dx/dt)` along the trajectory. Points where the growth rate is
/// not positive have no logarithm and come back as `None`.
pub fn derivative_of_log(
    traj: &Trajectory,
    component: &str,
) -> Result<Vec<(f64, Option<f64>)>, OdeError> {
    Ok(log_derivative(traj, component)?
        .into_iter()
        .map(|(t, rate)| (t, (rate > 0.0).then(|| rate.ln())))
        .collect())
}
