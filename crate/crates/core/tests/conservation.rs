use masersim_core::analysis::{conserved_quantity_drift, AnalysisError};
use masersim_core::models::{
    default_initial_state, normalize, ModelField, ModelVariant, NormalizedParams, PhysicalParams,
};
use masersim_core::ode::{integrate, log_derivative, IntegratorConfig};

fn run(variant: ModelVariant, p: &PhysicalParams, t_end: f64) -> (f64, NormalizedParams) {
    let np = normalize(p).unwrap().params;
    let field = ModelField::from_physical(variant, p).unwrap();
    let y0 = default_initial_state(variant, p).unwrap();
    let cfg = IntegratorConfig {
        t_end,
        sample_interval: 0.05,
        ..Default::default()
    };
    let traj = integrate(&field, &y0.values, &cfg).unwrap();
    (conserved_quantity_drift(&traj, variant, &np).unwrap(), np)
}

#[test]
fn every_variant_conserves_its_invariants() {
    for mu0 in [1e4, 2e6, 2e7] {
        let p = PhysicalParams {
            mu0,
            ..Default::default()
        };
        for v in [
            ModelVariant::TradDim,
            ModelVariant::SepDim,
            ModelVariant::TradNorm,
            ModelVariant::SepNorm,
        ] {
            let (drift, _) = run(v, &p, 50.0);
            assert!(drift < 1e-8, "{v} at mu0 = {mu0}: drift {drift}");
        }
    }
}

#[test]
fn literal_source_has_no_invariant() {
    let np = NormalizedParams {
        n0: 0.05,
        spontaneous_source_factor: 1.0,
        ..Default::default()
    };
    let field = ModelField::from_normalized(ModelVariant::SepNorm, &np).unwrap();
    let traj = integrate(&field, &[1.0, 0.01, 0.01], &IntegratorConfig::default()).unwrap();
    assert!(matches!(
        conserved_quantity_drift(&traj, ModelVariant::SepNorm, &np),
        Err(AnalysisError::NoConservedQuantity(_))
    ));
}

#[test]
fn coherent_growth_rate_tracks_inversion() {
    // d ln N_c/dT = M − θ holds pointwise; the finite-difference log
    // derivative of the sampled trajectory must reproduce it.
    let np = NormalizedParams {
        n0: 0.03,
        theta: 0.02,
        ..Default::default()
    };
    let field = ModelField::from_normalized(ModelVariant::SepNorm, &np).unwrap();
    let cfg = IntegratorConfig {
        t_end: 15.0,
        sample_interval: 1e-3,
        ..Default::default()
    };
    let traj = integrate(&field, &[1.0, 1e-3, 1e-3], &cfg).unwrap();
    let rates = log_derivative(&traj, "N_c").unwrap();
    let m = traj.component("M").unwrap();
    let worst = rates[1..rates.len() - 1]
        .iter()
        .zip(&m[1..])
        .map(|((_, r), m)| (r - (m - np.theta)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
}
