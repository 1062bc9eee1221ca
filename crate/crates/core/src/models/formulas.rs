//! Closed-form thresholds, stationary states and predicted rates.

use super::{ModelError, Normalization, NormalizedParams, PhysicalParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT_CGS: f64 = 2.998e10;

pub fn normalize(p: &PhysicalParams) -> Result<Normalization, ModelError> {
    if p.mu0 == 0.0 {
        return Err(ModelError::ZeroInversionScale(p.mu0));
    }
    p.validate()?;
    Ok(Normalization {
        params: NormalizedParams {
            n0: p.n_total / (p.mu0 * p.mu0),
            theta: p.delta / p.mu0,
            i0: p.i0,
            gamma_tilde: p.gamma - 2.0,
            spontaneous_source_factor: p.spontaneous_source_factor,
        },
        time_scale: p.mu0,
    })
}

/// Loss-driven instability threshold `δ/w21`. With rates in units of `w21`
/// this is `delta` itself.
pub fn threshold_mu_th1(p: &PhysicalParams) -> f64 {
    p.delta
}

/// Inversion at which spontaneous and coherent stimulated intensities
/// balance: `2√N`.
pub fn threshold_mu_th2(n_total: f64) -> f64 {
    2.0 * n_total.sqrt()
}

/// `√N`, the threshold inversion quoted alongside the normalized models
/// (it makes `N0 = 1`). Half of [`threshold_mu_th2`].
pub fn threshold_mu_0th(n_total: f64) -> f64 {
    n_total.sqrt()
}

/// Stationary inversion `μ0/2 − √((μ0/2)² + N)`, the negative root of
/// `μ² − μ0·μ − N = 0`.
pub fn stationary_inversion(mu0: f64, n_total: f64) -> f64 {
    let a = 0.5 * mu0;
    if n_total == 0.0 {
        return a - a.abs();
    }
    let root = a.hypot(n_total.sqrt());
    if a > 0.0 {
        // rationalized form avoids cancellation when μ0² ≫ N
        -n_total / (a + root)
    } else {
        a - root
    }
}

/// Stationary photon number `(μ0 − μ_st)/2` reached from a photon-free start.
pub fn stationary_photons(mu0: f64, n_total: f64) -> f64 {
    0.5 * (mu0 - stationary_inversion(mu0, n_total))
}

/// `u21/w21 = 2ω²/(πc³)` in CGS units.
pub fn einstein_alpha(omega: f64) -> f64 {
    2.0 * omega * omega / (PI * SPEED_OF_LIGHT_CGS.powi(3))
}

/// Angular frequency `2πc/λ` of a vacuum wavelength given in centimetres.
pub fn angular_frequency_cgs(wavelength_cm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_CGS / wavelength_cm
}

/// Convective inversion drive `Γ ≈ v/L`.
pub fn gamma_from_convection(speed: f64, length: f64) -> Result<f64, ModelError> {
    if !(length > 0.0) {
        return Err(ModelError::NonPositiveLength(length));
    }
    if !(speed >= 0.0) {
        return Err(ModelError::InvalidParameter(format!(
            "convection speed must be >= 0 (got {speed})"
        )));
    }
    Ok(speed / length)
}

/// Radiative loss of an open system of radius `R`: `c/R`.
pub fn loss_from_radius(radius: f64, c: f64) -> Result<f64, ModelError> {
    if !(radius > 0.0) {
        return Err(ModelError::NonPositiveRadius(radius));
    }
    Ok(c / radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    #[serde(rename = "M")]
    pub inversion: f64,
    #[serde(rename = "N_inc")]
    pub incoherent: f64,
    #[serde(rename = "N_c")]
    pub coherent: f64,
}

impl FixedPoint {
    pub fn as_vec(&self) -> Vec<f64> {
        vec![self.inversion, self.incoherent, self.coherent]
    }
}

/// Stationary point of the pulsating model:
/// `M* = θ`, `N_inc* = N0/(2θ)`, `N_c* = (Γ̃θ + 2I0)/(2θ)`.
pub fn pulsating_fixed_point(np: &NormalizedParams) -> Result<FixedPoint, ModelError> {
    let theta = np.theta;
    if theta == 0.0 {
        return Err(ModelError::ZeroLoss);
    }
    if !(theta > 0.0) {
        return Err(ModelError::InvalidParameter(format!(
            "theta must be > 0 (got {theta})"
        )));
    }
    Ok(FixedPoint {
        inversion: theta,
        incoherent: np.n0 / (2.0 * theta),
        coherent: (np.gamma_tilde * theta + 2.0 * np.i0) / (2.0 * theta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepetitionRate {
    /// `√(θ·Γ̃)`, read as an angular frequency.
    pub angular_frequency: f64,
    /// `2π/ω`; infinite when there is no drive.
    pub period: f64,
    /// Whether `Γ̃ > I0/θ` holds.
    pub valid: bool,
}

pub fn predicted_repetition_rate(np: &NormalizedParams) -> RepetitionRate {
    let product = np.theta * np.gamma_tilde;
    let omega = if product > 0.0 { product.sqrt() } else { 0.0 };
    RepetitionRate {
        angular_frequency: omega,
        period: if omega > 0.0 {
            2.0 * PI / omega
        } else {
            f64::INFINITY
        },
        valid: np.theta > 0.0 && np.gamma_tilde > np.i0 / np.theta,
    }
}

/// Mean radiation outflow `θ(N_c + N_inc) = (Γ̃θ + N0)/2` of the driven
/// system without collisional pumping.
pub fn predicted_outflow(np: &NormalizedParams) -> Result<f64, ModelError> {
    if !(np.theta > 0.0) {
        return Err(ModelError::ZeroLoss);
    }
    if np.i0 != 0.0 {
        return Err(ModelError::InvalidParameter(
            "outflow balance holds for I0 = 0 only".into(),
        ));
    }
    Ok(0.5 * (np.gamma_tilde * np.theta + np.n0))
}
