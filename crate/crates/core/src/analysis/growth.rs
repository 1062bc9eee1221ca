use serde::{Deserialize, Serialize};

/// Summary of a `ln(d ln N/dT)` curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    /// Highest level the curve holds for a full `window` (max over windows
    /// of the min inside it); `None` if no window is free of masked points.
    pub plateau: Option<f64>,
    pub window: f64,
    /// Growth rate (not its log) used for `longest_run`.
    pub rate_threshold: f64,
    /// Longest stretch of time with rate ≥ `rate_threshold`.
    pub longest_run: f64,
}

pub fn growth_summary(
    curve: &[(f64, Option<f64>)],
    window: f64,
    rate_threshold: f64,
) -> GrowthSummary {
    GrowthSummary {
        plateau: sustained_level(curve, window),
        window,
        rate_threshold,
        longest_run: longest_interval_at_or_above(curve, rate_threshold.ln()),
    }
}

/// Max over start samples `i` of `min{y_j : t_i ≤ t_j ≤ t_i + window}`,
/// counting only windows that fit inside the curve and contain no masked
/// samples.
pub fn sustained_level(curve: &[(f64, Option<f64>)], window: f64) -> Option<f64> {
    let t_last = curve.last()?.0;
    let slack = 1e-9 * window.abs().max(1.0);
    let mut best: Option<f64> = None;
    for (i, &(ti, _)) in curve.iter().enumerate() {
        if ti + window > t_last + slack {
            break;
        }
        let mut lo = f64::INFINITY;
        let mut masked = false;
        for &(t, y) in &curve[i..] {
            if t > ti + window + slack {
                break;
            }
            match y {
                Some(v) => lo = lo.min(v),
                None => {
                    masked = true;
                    break;
                }
            }
        }
        if !masked && lo.is_finite() {
            best = Some(best.map_or(lo, |b| b.max(lo)));
        }
    }
    best
}

/// Duration of the longest run of consecutive samples with value ≥ `level`.
pub fn longest_interval_at_or_above(curve: &[(f64, Option<f64>)], level: f64) -> f64 {
    let mut best = 0.0f64;
    let mut start: Option<f64> = None;
    for &(t, y) in curve {
        if y.is_some_and(|v| v >= level) {
            let s = *start.get_or_insert(t);
            best = best.max(t - s);
        } else {
            start = None;
        }
    }
    best
}
