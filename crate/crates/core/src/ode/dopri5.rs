//! Dormand–Prince 5(4) with PI step control and the standard quartic
//! Hermite-type continuous extension.

use super::sampling::{SampleGrid, Sampler};
use super::{IntegratorConfig, OdeError, Samples, StepStats, VectorField};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const MAX_SHRINK: f64 = 5.0; // 1 / min factor 0.2
const MAX_GROW: f64 = 0.1; // 1 / max factor 10

/// Coefficients of the continuous extension for one accepted step.
struct Dense {
    t_old: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl Dense {
    fn eval(&self, t: f64) -> Vec<f64> {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        (0..self.r[0].len())
            .map(|i| {
                self.r[0][i]
                    + s * (self.r[1][i]
                        + s1 * (self.r[2][i] + s * (self.r[3][i] + s1 * self.r[4][i])))
            })
            .collect()
    }
}

pub(crate) fn run<F: VectorField + ?Sized>(
    field: &F,
    y0: &[f64],
    cfg: &IntegratorConfig,
    grid: &SampleGrid,
) -> Result<Samples, OdeError> {
    let n = y0.len();
    let t_end = cfg.t_end;
    let mut stats = StepStats::default();
    let mut sampler = Sampler::new(grid, y0);

    let mut t = 0.0_f64;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    field.eval(t, &y, &mut k1);
    stats.evaluations += 1;
    if !k1.iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteState { t });
    }

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    let mut h = cfg.initial_step.min(cfg.max_step).min(t_end);
    let mut fac_old = 1e-4_f64;
    let mut last_rejected = false;
    let mut last_nonfinite = false;
    let mut attempts: u64 = 0;

    while t < t_end {
        if attempts >= cfg.max_steps {
            return Err(OdeError::MaxStepsExceeded {
                max_steps: cfg.max_steps,
                t,
            });
        }
        let last_step = t + h * (1.0 + 1e-9) >= t_end;
        if last_step {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(if last_nonfinite {
                OdeError::NonFiniteState { t }
            } else {
                OdeError::StepUnderflow { t, h }
            });
        }
        attempts += 1;

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        field.eval(t + C2 * h, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        field.eval(t + C3 * h, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        field.eval(t + C4 * h, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        field.eval(t + C5 * h, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last_step { t_end } else { t + h };
        field.eval(t_new, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        field.eval(t_new, &ynew, &mut k7);
        stats.evaluations += 6;

        let mut err = 0.0_f64;
        let mut finite = true;
        for i in 0..n {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(ynew[i].abs());
            let ratio = e.abs() / scale;
            if !(ratio.is_finite() && ynew[i].is_finite() && k7[i].is_finite()) {
                finite = false;
            }
            err = err.max(ratio);
        }

        if !finite {
            // A trial stage overflowed: retreat hard and retry.
            last_nonfinite = true;
            last_rejected = true;
            stats.rejected += 1;
            h *= 0.25;
            continue;
        }
        last_nonfinite = false;

        let fac11 = err.powf(EXPO);
        if err <= 1.0 {
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(MAX_GROW, MAX_SHRINK);
            let mut h_next = h / fac;
            fac_old = err.max(1e-4);
            stats.accepted += 1;

            let dense = dense_output(t, h, &y, &ynew, &k1, &k3, &k4, &k5, &k6, &k7);
            sampler.emit(t, t_new, &ynew, |ts| dense.eval(ts));

            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);

            if last_rejected {
                h_next = h_next.min(h);
            }
            last_rejected = false;
            h = h_next.min(cfg.max_step);
        } else {
            h /= MAX_SHRINK.min(fac11 / SAFETY);
            last_rejected = true;
            stats.rejected += 1;
        }
    }

    let (times, states) = sampler.finish();
    Ok((times, states, stats))
}

#[allow(clippy::too_many_arguments)]
fn dense_output(
    t_old: f64,
    h: f64,
    y: &[f64],
    ynew: &[f64],
    k1: &[f64],
    k3: &[f64],
    k4: &[f64],
    k5: &[f64],
    k6: &[f64],
    k7: &[f64],
) -> Dense {
    let n = y.len();
    let mut r0 = Vec::with_capacity(n);
    let mut r1 = Vec::with_capacity(n);
    let mut r2 = Vec::with_capacity(n);
    let mut r3 = Vec::with_capacity(n);
    let mut r4 = Vec::with_capacity(n);
    for i in 0..n {
        let ydiff = ynew[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        r0.push(y[i]);
        r1.push(ydiff);
        r2.push(bspl);
        r3.push(ydiff - h * k7[i] - bspl);
        r4.push(h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]));
    }
    Dense {
        t_old,
        h,
        r: [r0, r1, r2, r3, r4],
    }
}
