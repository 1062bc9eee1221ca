//! Two-level emitter rate-equation models.
//!
//! Five right-hand sides are provided (see [`ModelVariant`]). The two
//! dimensional variants keep raw counts (populations, inversion, photon
//! numbers) but are integrated in the normalized time `T = μ0·τ`, where
//! `τ = w21·t`, so every variant shares one clock.

mod formulas;
mod params;

pub use formulas::*;
pub use params::{Normalization, NormalizedParams, PhysicalParams};

use crate::ode::VectorField;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Initial photon count used by the default initial state.
pub const DEFAULT_INITIAL_PHOTONS: f64 = 3e4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("initial inversion mu0 must be positive to serve as the scale (got {0})")]
    ZeroInversionScale(f64),
    #[error("unknown model variant `{0}`")]
    UnknownVariant(String),
    #[error("theta = 0: no finite fixed point")]
    ZeroLoss,
    #[error("length must be positive (got {0})")]
    NonPositiveLength(f64),
    #[error("radius must be positive (got {0})")]
    NonPositiveRadius(f64),
    #[error("variant {0} needs physical parameters (population counts)")]
    RequiresPhysicalParams(ModelVariant),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelVariant {
    /// Traditional model with raw counts, state `(n2, μ, N_k)`.
    #[serde(rename = "trad-dim")]
    TradDim,
    /// Coherent/incoherent split with raw counts, state `(n2, μ, N_inc, N_c)`.
    #[serde(rename = "sep-dim")]
    SepDim,
    /// Normalized traditional model, state `(M1, N1)`.
    #[serde(rename = "trad-norm")]
    TradNorm,
    /// Normalized split model, state `(M, N_inc, N_c)`.
    #[serde(rename = "sep-norm")]
    SepNorm,
    /// Split model with inversion drive and collisional pumping, state `(M, N_inc, N_c)`.
    #[serde(rename = "puls-norm")]
    PulsNorm,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 5] = [
        ModelVariant::TradDim,
        ModelVariant::SepDim,
        ModelVariant::TradNorm,
        ModelVariant::SepNorm,
        ModelVariant::PulsNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::TradDim => "trad-dim",
            ModelVariant::SepDim => "sep-dim",
            ModelVariant::TradNorm => "trad-norm",
            ModelVariant::SepNorm => "sep-norm",
            ModelVariant::PulsNorm => "puls-norm",
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            ModelVariant::TradDim => &["n2", "mu", "N_k"],
            ModelVariant::SepDim => &["n2", "mu", "N_inc", "N_c"],
            ModelVariant::TradNorm => &["M1", "N1"],
            ModelVariant::SepNorm | ModelVariant::PulsNorm => &["M", "N_inc", "N_c"],
        }
    }

    pub fn is_normalized(self) -> bool {
        !matches!(self, ModelVariant::TradDim | ModelVariant::SepDim)
    }

    /// Component holding the stimulated (pulse-forming) photon number.
    pub fn pulse_component(self) -> &'static str {
        match self {
            ModelVariant::TradDim => "N_k",
            ModelVariant::TradNorm => "N1",
            _ => "N_c",
        }
    }

    pub fn inversion_component(self) -> &'static str {
        match self {
            ModelVariant::TradDim | ModelVariant::SepDim => "mu",
            ModelVariant::TradNorm => "M1",
            _ => "M",
        }
    }

    /// Photon components whose sum is the total photon number.
    pub fn photon_components(self) -> &'static [&'static str] {
        match self {
            ModelVariant::TradDim => &["N_k"],
            ModelVariant::TradNorm => &["N1"],
            _ => &["N_inc", "N_c"],
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| ModelError::UnknownVariant(s.to_string()))
    }
}

/// Initial values in the component order of a variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub variant: ModelVariant,
    pub values: Vec<f64>,
}

impl InitialState {
    pub fn new(variant: ModelVariant, values: Vec<f64>) -> Result<Self, ModelError> {
        let labels = variant.labels();
        if values.len() != labels.len() {
            return Err(ModelError::InvalidParameter(format!(
                "{variant} expects {} initial values, got {}",
                labels.len(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(ModelError::InvalidParameter(
                "initial values must be finite".into(),
            ));
        }
        for (label, v) in labels.iter().zip(&values) {
            if variant.photon_components().contains(label) && *v < 0.0 {
                return Err(ModelError::InvalidParameter(format!(
                    "photon component {label} must be >= 0 (got {v})"
                )));
            }
        }
        Ok(Self { variant, values })
    }
}

/// Default initial values: `M = M1 = 1`, every normalized photon pool at
/// `N_k0/μ0`; dimensional variants start at `n2 = (N + μ0)/2`, `μ = μ0` and
/// `N_k0` photons in each pool.
pub fn default_initial_state(
    variant: ModelVariant,
    p: &PhysicalParams,
) -> Result<InitialState, ModelError> {
    if !(p.mu0 > 0.0) {
        return Err(ModelError::ZeroInversionScale(p.mu0));
    }
    let photons = p.nk0 / p.mu0;
    let n2 = (p.n_total + p.mu0) / 2.0;
    let values = match variant {
        ModelVariant::TradDim => vec![n2, p.mu0, p.nk0],
        ModelVariant::SepDim => vec![n2, p.mu0, p.nk0, p.nk0],
        ModelVariant::TradNorm => vec![1.0, photons],
        ModelVariant::SepNorm | ModelVariant::PulsNorm => vec![1.0, photons, photons],
    };
    InitialState::new(variant, values)
}

/// Fixed point of the pulsating model with the inversion displaced by
/// `relative_offset` (e.g. `0.1` for +10 %).
pub fn perturbed_fixed_point(
    np: &NormalizedParams,
    relative_offset: f64,
) -> Result<InitialState, ModelError> {
    let fp = pulsating_fixed_point(np)?;
    InitialState::new(
        ModelVariant::PulsNorm,
        vec![
            fp.inversion * (1.0 + relative_offset),
            fp.incoherent,
            fp.coherent,
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Rhs {
    TradDim {
        alpha: f64,
        inv_mu0: f64,
    },
    SepDim {
        inv_mu0: f64,
    },
    TradNorm {
        n0: f64,
        theta: f64,
    },
    SepNorm {
        n0: f64,
        theta: f64,
        source: f64,
    },
    PulsNorm {
        n0: f64,
        theta: f64,
        i0: f64,
        gamma_tilde: f64,
    },
}

/// Right-hand side of one model variant with its parameters bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelField {
    variant: ModelVariant,
    rhs: Rhs,
}

impl ModelField {
    pub fn from_physical(variant: ModelVariant, p: &PhysicalParams) -> Result<Self, ModelError> {
        p.validate()?;
        match variant {
            ModelVariant::TradDim => Ok(Self {
                variant,
                rhs: Rhs::TradDim {
                    alpha: p.alpha,
                    inv_mu0: 1.0 / p.mu0,
                },
            }),
            ModelVariant::SepDim => Ok(Self {
                variant,
                rhs: Rhs::SepDim {
                    inv_mu0: 1.0 / p.mu0,
                },
            }),
            _ => Self::from_normalized(variant, &normalize(p)?.params),
        }
    }

    pub fn from_normalized(
        variant: ModelVariant,
        np: &NormalizedParams,
    ) -> Result<Self, ModelError> {
        np.validate()?;
        let (n0, theta) = (np.n0, np.theta);
        let rhs = match variant {
            ModelVariant::TradDim | ModelVariant::SepDim => {
                return Err(ModelError::RequiresPhysicalParams(variant))
            }
            ModelVariant::TradNorm => Rhs::TradNorm { n0, theta },
            ModelVariant::SepNorm => Rhs::SepNorm {
                n0,
                theta,
                source: np.spontaneous_source_factor,
            },
            ModelVariant::PulsNorm => Rhs::PulsNorm {
                n0,
                theta,
                i0: np.i0,
                gamma_tilde: np.gamma_tilde,
            },
        };
        Ok(Self { variant, rhs })
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }
}

impl VectorField for ModelField {
    fn dimension(&self) -> usize {
        self.variant.labels().len()
    }

    fn labels(&self) -> Vec<String> {
        self.variant
            .labels()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn eval(&self, _t: f64, y: &[f64], d: &mut [f64]) {
        match self.rhs {
            Rhs::TradDim { alpha, inv_mu0 } => {
                let (n2, mu, nk) = (y[0], y[1], y[2]);
                let spont = alpha * n2;
                let stim = mu * nk;
                d[0] = (-spont - stim) * inv_mu0;
                d[1] = (-2.0 * spont - 2.0 * stim) * inv_mu0;
                d[2] = (spont + stim) * inv_mu0;
            }
            Rhs::SepDim { inv_mu0 } => {
                let (n2, mu, nc) = (y[0], y[1], y[3]);
                let stim = mu * nc;
                d[0] = (-n2 - stim) * inv_mu0;
                d[1] = (-2.0 * n2 - 2.0 * stim) * inv_mu0;
                d[2] = n2 * inv_mu0;
                d[3] = stim * inv_mu0;
            }
            Rhs::TradNorm { n0, theta } => {
                let (m1, n1) = (y[0], y[1]);
                d[0] = -n0 - 2.0 * m1 * n1;
                d[1] = 0.5 * n0 + m1 * n1 - theta * n1;
            }
            Rhs::SepNorm { n0, theta, source } => {
                let (m, ninc, nc) = (y[0], y[1], y[2]);
                d[0] = -n0 - 2.0 * m * nc;
                d[1] = source * n0 - theta * ninc;
                d[2] = (m - theta) * nc;
            }
            Rhs::PulsNorm {
                n0,
                theta,
                i0,
                gamma_tilde,
            } => {
                let (m, ninc, nc) = (y[0], y[1], y[2]);
                d[0] = gamma_tilde * m - 2.0 * m * nc + 2.0 * i0;
                d[1] = 0.5 * n0 - theta * ninc;
                d[2] = (m - theta) * nc;
            }
        }
    }
}

/// Builds the vector field of `variant` from physical parameters.
pub fn vector_field(variant: ModelVariant, p: &PhysicalParams) -> Result<ModelField, ModelError> {
    ModelField::from_physical(variant, p)
}
