use masersim_core::models::{pulsating_fixed_point, ModelField, ModelVariant, NormalizedParams};
use masersim_core::ode::VectorField;
use masersim_core::sweep::{figure_preset, run_sweep, ParamSet};

/// Small-oscillation period from the finite-difference Jacobian of the
/// (M, N_c) subsystem at the fixed point.
fn linearized_period(np: &NormalizedParams) -> f64 {
    let f = ModelField::from_normalized(ModelVariant::PulsNorm, np).unwrap();
    let fp = pulsating_fixed_point(np).unwrap().as_vec();
    let idx = [0usize, 2];
    let mut j = [[0.0; 2]; 2];
    for (c, &col) in idx.iter().enumerate() {
        let h = 1e-6 * fp[col].abs().max(1e-3);
        let (mut up, mut dn) = (fp.clone(), fp.clone());
        up[col] += h;
        dn[col] -= h;
        let (mut fu, mut fd) = (vec![0.0; 3], vec![0.0; 3]);
        f.eval(0.0, &up, &mut fu);
        f.eval(0.0, &dn, &mut fd);
        for (r, &row) in idx.iter().enumerate() {
            j[r][c] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let omega = (det - tr * tr / 4.0).sqrt();
    2.0 * std::f64::consts::PI / omega
}

#[test]
fn fig8_train_and_outflow() {
    let spec = figure_preset("fig8").unwrap();
    let np = match spec.base_params {
        ParamSet::Normalized(np) => np,
        _ => unreachable!(),
    };
    let oracle_period = linearized_period(&np);
    assert!((oracle_period - 31.4159).abs() < 1e-3, "{oracle_period}");

    let out = run_sweep(&spec, None).unwrap();
    let a = &out.records[0].analyses;
    let train = a.pulse_train.as_ref().unwrap();
    assert!(train.peak_times.len() >= 5);
    // finite perturbation lengthens the period only slightly
    assert!(
        (train.mean_period / oracle_period - 1.0).abs() < 0.01,
        "{}",
        train.mean_period
    );
    assert!(train.period_cv < 1e-3);

    let flow = a.outflow.unwrap();
    let expected = 0.5 * (np.gamma_tilde * np.theta + np.n0);
    assert!(flow.measured.window_end - flow.measured.window_start >= 5.0 * train.mean_period);
    assert!((flow.measured.mean_total_outflow / expected - 1.0).abs() < 0.01);
    assert!((flow.measured.mean_incoherent_outflow - np.n0 / 2.0).abs() < 1e-6);
}
