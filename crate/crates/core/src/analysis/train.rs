use super::{component, parabolic_peak, AnalysisError};
use crate::ode::Trajectory;
use serde::{Deserialize, Serialize};

/// Peaks of a periodic signal and the statistics of their spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTrain {
    pub peak_times: Vec<f64>,
    pub peak_values: Vec<f64>,
    pub spacings: Vec<f64>,
    pub mean_period: f64,
    /// Population standard deviation of the spacings over their mean.
    pub period_cv: f64,
    pub mean_peak_value: f64,
}

/// Detects the peaks of `name`, ignoring samples before `settle` if given.
pub fn detect_pulse_train(
    traj: &Trajectory,
    name: &str,
    prominence_frac: f64,
    settle: Option<f64>,
) -> Result<PulseTrain, AnalysisError> {
    let values = component(traj, name)?;
    let start = settle.map_or(0, |ts| traj.times.partition_point(|&t| t < ts));
    detect_pulse_train_series(&traj.times[start..], &values[start..], prominence_frac)
}

pub fn detect_pulse_train_series(
    t: &[f64],
    x: &[f64],
    prominence_frac: f64,
) -> Result<PulseTrain, AnalysisError> {
    if !(prominence_frac > 0.0 && prominence_frac < 1.0) {
        return Err(AnalysisError::InvalidProminence(prominence_frac));
    }
    let n = x.len().min(t.len());
    if n < 3 {
        return Err(AnalysisError::FewerThanTwoPeaks(0));
    }
    let (lo, hi) = x[..n]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let min_prominence = prominence_frac * (hi - lo);

    let mut peak_times = Vec::new();
    let mut peak_values = Vec::new();
    for (first, last) in local_maxima(&x[..n]) {
        if prominence(&x[..n], first, last) < min_prominence || min_prominence <= 0.0 {
            continue;
        }
        let (tp, xp) = if first == last {
            parabolic_peak(
                [t[first - 1], t[first], t[first + 1]],
                [x[first - 1], x[first], x[first + 1]],
            )
            .unwrap_or((t[first], x[first]))
        } else {
            (0.5 * (t[first] + t[last]), x[first])
        };
        peak_times.push(tp);
        peak_values.push(xp);
    }
    if peak_times.len() < 2 {
        return Err(AnalysisError::FewerThanTwoPeaks(peak_times.len()));
    }

    let spacings: Vec<f64> = peak_times.windows(2).map(|w| w[1] - w[0]).collect();
    let k = spacings.len() as f64;
    let mean_period = spacings.iter().sum::<f64>() / k;
    let var = spacings
        .iter()
        .map(|s| (s - mean_period).powi(2))
        .sum::<f64>()
        / k;
    let mean_peak_value = peak_values.iter().sum::<f64>() / peak_values.len() as f64;
    Ok(PulseTrain {
        period_cv: var.sqrt() / mean_period,
        peak_times,
        peak_values,
        spacings,
        mean_period,
        mean_peak_value,
    })
}

/// Strict local maxima as inclusive index ranges; flat tops form one range.
/// Endpoints of the series never count.
fn local_maxima(x: &[f64]) -> Vec<(usize, usize)> {
    let n = x.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                out.push((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Height of a peak above the higher of the two lowest points reachable on
/// either side before meeting higher ground.
fn prominence(x: &[f64], first: usize, last: usize) -> f64 {
    let h = x[first];
    let mut left_min = h;
    for &v in x[..first].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[last + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(t1: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t1 * i as f64 / n as f64).collect()
    }

    #[test]
    fn sinusoid_period() {
        let t = grid(100.0, 20_000);
        let x: Vec<f64> = t
            .iter()
            .map(|s| (2.0 * std::f64::consts::PI * s / 7.3).sin())
            .collect();
        let train = detect_pulse_train_series(&t, &x, 0.05).unwrap();
        assert!((train.mean_period / 7.3 - 1.0).abs() < 1e-3, "{train:?}");
        assert!(train.period_cv < 0.01);
        assert_eq!(train.peak_times.len(), 14);
        assert!((train.mean_peak_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ripples_below_prominence_ignored() {
        let t = grid(50.0, 10_000);
        let x: Vec<f64> = t
            .iter()
            .map(|s| (s * std::f64::consts::PI / 5.0).sin() + 0.01 * (s * 40.0).sin())
            .collect();
        let train = detect_pulse_train_series(&t, &x, 0.05).unwrap();
        assert_eq!(train.peak_times.len(), 5);
        assert!((train.mean_period - 10.0).abs() < 0.05);
    }

    #[test]
    fn flat_topped_peaks_use_midpoint() {
        let t: Vec<f64> = (0..9).map(f64::from).collect();
        let x = [0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        let train = detect_pulse_train_series(&t, &x, 0.05).unwrap();
        assert_eq!(train.peak_times, vec![2.0, 5.5]);
    }

    #[test]
    fn single_pulse_is_not_a_train() {
        let t = grid(10.0, 1000);
        let x: Vec<f64> = t.iter().map(|s| (-(s - 5.0).powi(2)).exp()).collect();
        assert_eq!(
            detect_pulse_train_series(&t, &x, 0.05),
            Err(AnalysisError::FewerThanTwoPeaks(1))
        );
        assert!(matches!(
            detect_pulse_train_series(&t, &x, 1.5),
            Err(AnalysisError::InvalidProminence(_))
        ));
    }

    proptest! {
        #[test]
        fn reversal_preserves_spacings(seed in proptest::collection::vec(0.5f64..2.0, 3..8)) {
            // pulses of varying width at increasing, irregular positions
            let mut centers = Vec::new();
            let mut c = 3.0;
            for w in &seed {
                c += 4.0 * w;
                centers.push((c, *w));
            }
            let t1 = c + 8.0;
            let t = grid(t1, 8000);
            let f = |s: f64| centers.iter().map(|(c, w)| (-((s - c) / w).powi(2)).exp()).sum::<f64>();
            let x: Vec<f64> = t.iter().map(|&s| f(s)).collect();
            let a = detect_pulse_train_series(&t, &x, 0.05).unwrap();

            let tr: Vec<f64> = t.iter().rev().map(|s| t1 - s).collect();
            let xr: Vec<f64> = x.iter().rev().copied().collect();
            let b = detect_pulse_train_series(&tr, &xr, 0.05).unwrap();

            prop_assert_eq!(a.spacings.len(), b.spacings.len());
            for (sa, sb) in a.spacings.iter().zip(b.spacings.iter().rev()) {
                prop_assert!((sa - sb).abs() < 1e-9, "{} vs {}", sa, sb);
            }
        }
    }
}
