//! Classical fixed-step RK4 with cubic Hermite sampling between steps.

use super::sampling::{SampleGrid, Sampler};
use super::{IntegratorConfig, OdeError, Samples, StepStats, VectorField};

pub(crate) fn run<F: VectorField + ?Sized>(
    field: &F,
    y0: &[f64],
    cfg: &IntegratorConfig,
    grid: &SampleGrid,
) -> Result<Samples, OdeError> {
    let n = y0.len();
    let h = cfg.initial_step;
    let t_end = cfg.t_end;
    let steps = (t_end / h - 1e-9).ceil().max(1.0) as u64;
    if steps > cfg.max_steps {
        return Err(OdeError::MaxStepsExceeded {
            max_steps: cfg.max_steps,
            t: 0.0,
        });
    }

    let mut stats = StepStats::default();
    let mut sampler = Sampler::new(grid, y0);
    let mut y = y0.to_vec();
    let mut f0 = vec![0.0; n];
    field.eval(0.0, &y, &mut f0);
    stats.evaluations += 1;
    if !f0.iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteState { t: 0.0 });
    }

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut f1 = vec![0.0; n];

    for step in 0..steps {
        let t = step as f64 * h;
        let (t_new, dt) = if step + 1 == steps {
            (t_end, t_end - t)
        } else {
            ((step + 1) as f64 * h, h)
        };
        let half = 0.5 * dt;
        for i in 0..n {
            tmp[i] = y[i] + half * f0[i];
        }
        field.eval(t + half, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + half * k2[i];
        }
        field.eval(t + half, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + dt * k3[i];
        }
        field.eval(t_new, &tmp, &mut k4);
        for i in 0..n {
            ynew[i] = y[i] + dt / 6.0 * (f0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        field.eval(t_new, &ynew, &mut f1);
        stats.evaluations += 4;
        stats.accepted += 1;
        if !(ynew.iter().all(|v| v.is_finite()) && f1.iter().all(|v| v.is_finite())) {
            return Err(OdeError::NonFiniteState { t: t_new });
        }

        sampler.emit(t, t_new, &ynew, |ts| {
            hermite(t, dt, &y, &ynew, &f0, &f1, ts)
        });

        std::mem::swap(&mut y, &mut ynew);
        std::mem::swap(&mut f0, &mut f1);
    }

    let (times, states) = sampler.finish();
    Ok((times, states, stats))
}

fn hermite(t0: f64, h: f64, y0: &[f64], y1: &[f64], f0: &[f64], f1: &[f64], t: f64) -> Vec<f64> {
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    (0..y0.len())
        .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
        .collect()
}
