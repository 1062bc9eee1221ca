use super::{RunRecord, SweepError};
use serde::{Deserialize, Serialize};

/// Two runs on a shared time grid, column-aligned for overlay plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    /// `T`, then the first run's labels, then the second's (a clashing label
    /// gets a `_b` suffix).
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<f64>>,
    /// `max |M_a − M_b|` over the window, inversion components compared.
    pub max_inversion_divergence: f64,
    /// `max |N_a − N_b|` of the total photon numbers.
    pub max_photon_divergence: f64,
}

pub fn compare_models(a: &RunRecord, b: &RunRecord) -> Result<ModelComparison, SweepError> {
    let (ta, tb) = match (&a.trajectory, &b.trajectory) {
        (Some(ta), Some(tb)) => (ta, tb),
        _ => {
            return Err(SweepError::MismatchedGrids(
                "both records need a trajectory".into(),
            ))
        }
    };
    if ta.times != tb.times {
        return Err(SweepError::MismatchedGrids(format!(
            "{} samples to t = {} vs {} samples to t = {}",
            ta.len(),
            ta.times.last().copied().unwrap_or(0.0),
            tb.len(),
            tb.times.last().copied().unwrap_or(0.0)
        )));
    }

    let mut columns = vec!["T".to_string()];
    columns.extend(ta.labels.iter().cloned());
    for l in &tb.labels {
        columns.push(if ta.labels.contains(l) {
            format!("{l}_b")
        } else {
            l.clone()
        });
    }

    let index = |labels: &[String], name: &str| labels.iter().position(|l| l == name);
    let inv = |r: &RunRecord| r.variant.inversion_component();
    let (ia, ib) = match (index(&ta.labels, inv(a)), index(&tb.labels, inv(b))) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(SweepError::MismatchedGrids(
                "inversion component missing".into(),
            ))
        }
    };
    let photon_idx = |r: &RunRecord, labels: &[String]| -> Vec<usize> {
        r.variant
            .photon_components()
            .iter()
            .filter_map(|p| index(labels, p))
            .collect()
    };
    let (pa, pb) = (photon_idx(a, &ta.labels), photon_idx(b, &tb.labels));

    // Dimensional runs are compared on the μ0-scaled axis.
    let scale = |r: &RunRecord| {
        if r.variant.is_normalized() {
            1.0
        } else {
            1.0 / r.physical.mu0
        }
    };
    let (sa, sb) = (scale(a), scale(b));

    let mut rows = Vec::with_capacity(ta.len());
    let (mut dm, mut dn) = (0.0f64, 0.0f64);
    for ((t, ya), yb) in ta.times.iter().zip(&ta.states).zip(&tb.states) {
        let mut row = Vec::with_capacity(columns.len());
        row.push(*t);
        row.extend_from_slice(ya);
        row.extend_from_slice(yb);
        rows.push(row);
        dm = dm.max((ya[ia] * sa - yb[ib] * sb).abs());
        let na: f64 = pa.iter().map(|&i| ya[i]).sum::<f64>() * sa;
        let nb: f64 = pb.iter().map(|&i| yb[i]).sum::<f64>() * sb;
        dn = dn.max((na - nb).abs());
    }
    Ok(ModelComparison {
        columns,
        rows,
        max_inversion_divergence: dm,
        max_photon_divergence: dn,
    })
}
