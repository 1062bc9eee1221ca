use super::{component, AnalysisError};
use crate::models::{ModelVariant, NormalizedParams};
use crate::ode::Trajectory;
use serde::{Deserialize, Serialize};

/// A linear combination of components that the dynamics leave unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantity {
    pub name: String,
    pub terms: Vec<(String, f64)>,
}

impl ConservedQuantity {
    fn new(name: &str, terms: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            terms: terms.iter().map(|(l, c)| (l.to_string(), *c)).collect(),
        }
    }

    /// Maximum of `|Q(t) − Q(0)| / max(|Q(0)|, 1)` along the trajectory.
    pub fn drift(&self, traj: &Trajectory) -> Result<f64, AnalysisError> {
        let cols = self
            .terms
            .iter()
            .map(|(label, c)| component(traj, label).map(|v| (v, *c)))
            .collect::<Result<Vec<_>, _>>()?;
        let q = |i: usize| cols.iter().map(|(v, c)| c * v[i]).sum::<f64>();
        if traj.is_empty() {
            return Ok(0.0);
        }
        let q0 = q(0);
        let scale = q0.abs().max(1.0);
        Ok((0..traj.len())
            .map(|i| (q(i) - q0).abs() / scale)
            .fold(0.0, f64::max))
    }
}

/// Invariants of `variant` under the given parameters. Losses, pumping and
/// the literal spontaneous source break them in the normalized variants.
pub fn conserved_quantities(
    variant: ModelVariant,
    np: &NormalizedParams,
) -> Result<Vec<ConservedQuantity>, AnalysisError> {
    let lossless = np.theta == 0.0;
    let q = match variant {
        ModelVariant::TradDim => vec![
            ConservedQuantity::new("N_total", &[("n2", 2.0), ("mu", -1.0)]),
            ConservedQuantity::new("energy", &[("mu", 1.0), ("N_k", 2.0)]),
        ],
        ModelVariant::SepDim => vec![
            ConservedQuantity::new("N_total", &[("n2", 2.0), ("mu", -1.0)]),
            ConservedQuantity::new("energy", &[("mu", 1.0), ("N_inc", 2.0), ("N_c", 2.0)]),
        ],
        ModelVariant::TradNorm if lossless => {
            vec![ConservedQuantity::new(
                "energy",
                &[("M1", 1.0), ("N1", 2.0)],
            )]
        }
        ModelVariant::SepNorm if lossless && np.spontaneous_source_factor == 0.5 => {
            vec![ConservedQuantity::new(
                "energy",
                &[("M", 1.0), ("N_inc", 2.0), ("N_c", 2.0)],
            )]
        }
        ModelVariant::PulsNorm if lossless && np.i0 == 0.0 && np.gamma_tilde == 0.0 => {
            vec![ConservedQuantity::new(
                "energy",
                &[("M", 1.0), ("N_c", 2.0)],
            )]
        }
        _ => {
            return Err(AnalysisError::NoConservedQuantity(format!(
                "{variant} with theta = {}, I0 = {}, Gamma_tilde = {}, source factor {}",
                np.theta, np.i0, np.gamma_tilde, np.spontaneous_source_factor
            )))
        }
    };
    Ok(q)
}

/// Largest relative drift over all invariants of the variant.
pub fn conserved_quantity_drift(
    traj: &Trajectory,
    variant: ModelVariant,
    np: &NormalizedParams,
) -> Result<f64, AnalysisError> {
    conserved_quantities(variant, np)?
        .iter()
        .try_fold(0.0, |acc, q| Ok(f64::max(acc, q.drift(traj)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelField, NormalizedParams};
    use crate::ode::{integrate, IntegratorConfig, VectorField};

    #[test]
    fn invariants_are_invariant() {
        // d/dt of each invariant's coefficients dotted with the field is zero
        // at arbitrary states.
        let np = NormalizedParams {
            n0: 0.3,
            ..Default::default()
        };
        for variant in [
            ModelVariant::TradNorm,
            ModelVariant::SepNorm,
            ModelVariant::PulsNorm,
        ] {
            let f = ModelField::from_normalized(variant, &np).unwrap();
            let labels = f.labels();
            for q in conserved_quantities(variant, &np).unwrap() {
                for y in [[0.7, 0.2, 1.3], [-2.0, 5.0, 0.01]] {
                    let y = &y[..f.dimension()];
                    let mut d = vec![0.0; f.dimension()];
                    f.eval(0.0, y, &mut d);
                    let dq: f64 = q
                        .terms
                        .iter()
                        .map(|(l, c)| c * d[labels.iter().position(|x| x == l).unwrap()])
                        .sum();
                    assert!(dq.abs() < 1e-14, "{variant} {}: {dq}", q.name);
                }
            }
        }
    }

    #[test]
    fn losses_break_conservation() {
        let np = NormalizedParams {
            n0: 0.3,
            theta: 0.1,
            ..Default::default()
        };
        assert!(matches!(
            conserved_quantities(ModelVariant::SepNorm, &np),
            Err(AnalysisError::NoConservedQuantity(_))
        ));
        let literal = NormalizedParams {
            n0: 0.3,
            spontaneous_source_factor: 1.0,
            ..Default::default()
        };
        assert!(conserved_quantities(ModelVariant::SepNorm, &literal).is_err());
        assert_eq!(
            conserved_quantities(ModelVariant::TradDim, &np)
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn drift_small_along_solution() {
        let np = NormalizedParams {
            n0: 0.05,
            ..Default::default()
        };
        let f = ModelField::from_normalized(ModelVariant::TradNorm, &np).unwrap();
        let traj = integrate(&f, &[1.0, 0.01], &IntegratorConfig::default()).unwrap();
        let drift = conserved_quantity_drift(&traj, ModelVariant::TradNorm, &np).unwrap();
        assert!(drift < 1e-12, "{drift}");
    }
}
