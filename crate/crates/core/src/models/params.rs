use super::{ModelError, DEFAULT_INITIAL_PHOTONS};
use serde::{Deserialize, Serialize};

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn half() -> f64 {
    0.5
}
fn default_nk0() -> f64 {
    DEFAULT_INITIAL_PHOTONS
}

/// Dimensional parameter set. Rates are measured in units of `w21`
/// (with `u21 = w21 = w12`), so `delta` is the loss rate `δ/w21` expressed as
/// an inversion count and `mu0` also serves as the time scale `T = μ0·τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Total number of emitters `n1 + n2`.
    #[serde(rename = "N_total")]
    pub n_total: f64,
    /// Initial inversion `n2 − n1`.
    pub mu0: f64,
    /// Photon loss rate.
    pub delta: f64,
    /// `u21/w21`; only the traditional dimensional model uses it.
    #[serde(default = "one")]
    pub alpha: f64,
    /// Collisional pump strength, `(ν − u21)·n1 = μ0²·I0`.
    #[serde(rename = "I0", default)]
    pub i0: f64,
    /// Inversion drive `Γ`.
    #[serde(rename = "Gamma", default = "two")]
    pub gamma: f64,
    /// Initial photon count in each photon pool.
    #[serde(rename = "Nk0", default = "default_nk0")]
    pub nk0: f64,
    #[serde(default = "half")]
    pub spontaneous_source_factor: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            n_total: 1e12,
            mu0: 2e6,
            delta: 0.0,
            alpha: 1.0,
            i0: 0.0,
            gamma: 2.0,
            nk0: DEFAULT_INITIAL_PHOTONS,
            spontaneous_source_factor: 0.5,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidParameter(msg));
        if !(self.n_total > 0.0 && self.n_total.is_finite()) {
            return bad(format!("N_total must be > 0 (got {})", self.n_total));
        }
        if self.mu0 == 0.0 {
            return Err(ModelError::ZeroInversionScale(self.mu0));
        }
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return bad(format!("mu0 must be > 0 (got {})", self.mu0));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be >= 0 (got {})", self.delta));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0 (got {})", self.alpha));
        }
        if !(self.i0 >= 0.0 && self.i0.is_finite()) {
            return bad(format!("I0 must be >= 0 (got {})", self.i0));
        }
        if !self.gamma.is_finite() {
            return bad("Gamma must be finite".into());
        }
        if !(self.nk0 >= 0.0 && self.nk0.is_finite()) {
            return bad(format!("Nk0 must be >= 0 (got {})", self.nk0));
        }
        check_source_factor(self.spontaneous_source_factor)
    }

    /// Physical parameters that normalize back to `np` for a system of
    /// `n_total` emitters (`μ0 = √(N/N0)`, `δ = θ·μ0`, `Γ = Γ̃ + 2`).
    pub fn from_normalized(np: &NormalizedParams, n_total: f64) -> Self {
        let mu0 = (n_total / np.n0).sqrt();
        Self {
            n_total,
            mu0,
            delta: np.theta * mu0,
            alpha: 1.0,
            i0: np.i0,
            gamma: np.gamma_tilde + 2.0,
            nk0: DEFAULT_INITIAL_PHOTONS,
            spontaneous_source_factor: np.spontaneous_source_factor,
        }
    }
}

fn check_source_factor(f: f64) -> Result<(), ModelError> {
    if f == 0.5 || f == 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter(format!(
            "spontaneous_source_factor must be 0.5 or 1.0 (got {f})"
        )))
    }
}

/// Dimensionless parameters of the normalized variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedParams {
    /// `N/μ0²`.
    #[serde(rename = "N0")]
    pub n0: f64,
    /// `δ/μ0`.
    #[serde(default)]
    pub theta: f64,
    #[serde(rename = "I0", default)]
    pub i0: f64,
    /// `Γ − 2`.
    #[serde(rename = "Gamma_tilde", default)]
    pub gamma_tilde: f64,
    /// Multiplier on `N0` in the incoherent-photon source; 0.5 keeps the
    /// split model's inversion/photon balance exact, 1.0 is the literal form.
    #[serde(default = "half")]
    pub spontaneous_source_factor: f64,
}

impl Default for NormalizedParams {
    fn default() -> Self {
        Self {
            n0: 1.0,
            theta: 0.0,
            i0: 0.0,
            gamma_tilde: 0.0,
            spontaneous_source_factor: 0.5,
        }
    }
}

impl NormalizedParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "N0 must be > 0 (got {})",
                self.n0
            )));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "theta must be >= 0 (got {})",
                self.theta
            )));
        }
        if !(self.i0 >= 0.0 && self.i0.is_finite()) || !self.gamma_tilde.is_finite() {
            return Err(ModelError::InvalidParameter(
                "I0 must be >= 0 and Gamma_tilde finite".into(),
            ));
        }
        check_source_factor(self.spontaneous_source_factor)
    }

    /// Factor converting normalized time `T` into `τ·√N`, i.e. time measured
    /// in units of `1/(w21·√N)`.
    pub fn threshold_time_factor(&self) -> f64 {
        self.n0.sqrt()
    }
}

/// Result of [`super::normalize`]: the dimensionless set plus the time
/// scale `μ0` (`T = μ0·τ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub params: NormalizedParams,
    pub time_scale: f64,
}

impl Normalization {
    pub fn to_tau(&self, t: f64) -> f64 {
        t / self.time_scale
    }

    pub fn to_t(&self, tau: f64) -> f64 {
        tau * self.time_scale
    }
}
