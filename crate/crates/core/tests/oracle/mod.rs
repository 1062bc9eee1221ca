//! Reference implementations kept deliberately plain: classical RK4 on a
//! fixed step and half-maximum measurement without peak refinement.

#![allow(dead_code)]

pub fn rk4<F: Fn(&[f64], &mut [f64])>(
    f: F,
    y0: &[f64],
    h: f64,
    steps: usize,
    keep_every: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = y0.len();
    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut times = vec![0.0];
    let mut states = vec![y.clone()];
    for step in 1..=steps {
        f(&y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % keep_every == 0 {
            times.push(step as f64 * h);
            states.push(y.clone());
        }
    }
    (times, states)
}

/// Split-photon model, normalized, source factor 1/2.
pub fn sep_norm(n0: f64, theta: f64) -> impl Fn(&[f64], &mut [f64]) {
    move |y, d| {
        d[0] = -n0 - 2.0 * y[0] * y[2];
        d[1] = 0.5 * n0 - theta * y[1];
        d[2] = (y[0] - theta) * y[2];
    }
}

/// (peak value, leading, trailing) from the raw samples.
pub fn half_max_edges(t: &[f64], x: &[f64]) -> (f64, f64, f64) {
    let (ip, &peak) = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let half = peak / 2.0;
    let mut i = ip;
    while x[i] >= half {
        i -= 1;
    }
    let left = t[i] + (half - x[i]) / (x[i + 1] - x[i]) * (t[i + 1] - t[i]);
    let mut j = ip;
    while x[j] >= half {
        j += 1;
    }
    let right = t[j - 1] + (half - x[j - 1]) / (x[j] - x[j - 1]) * (t[j] - t[j - 1]);
    (peak, t[ip] - left, right - t[ip])
}
