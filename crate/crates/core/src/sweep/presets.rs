use super::{
    AnalysisKind, Axis, InitialRule, ParamSet, SweepError, SweepSpec, TimeBase, DEFAULT_GRID_CAP,
    DEFAULT_REFERENCE_N_TOTAL,
};
use crate::analysis::DEFAULT_PROMINENCE_FRAC;
use crate::models::{ModelVariant, NormalizedParams, PhysicalParams};
use crate::ode::IntegratorConfig;

pub const PRESET_NAMES: [&str; 8] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
];

pub const FIG1_N0_VALUES: [f64; 9] = [30.0, 10.0, 5.0, 2.0, 1.0, 0.5, 0.2, 0.1, 0.03];

/// Initial inversions of the pulse-shape families, ascending.
pub fn fig6_mu0_values() -> Vec<f64> {
    [2.0, 4.0, 10.0, 20.0, 50.0, 100.0, 200.0, 400.0, 1000.0]
        .iter()
        .map(|x: &f64| x.sqrt() * 1e6)
        .collect()
}

fn spec(
    label: &str,
    variants: Vec<ModelVariant>,
    base_params: ParamSet,
    axes: Vec<Axis>,
    integrator: IntegratorConfig,
    analyses: Vec<AnalysisKind>,
) -> SweepSpec {
    SweepSpec {
        seed_label: label.to_string(),
        variants,
        base_params,
        axes,
        reference_n_total: DEFAULT_REFERENCE_N_TOTAL,
        time_base: TimeBase::Normalized,
        initial_state: InitialRule::Default,
        integrator,
        analyses,
        prominence_frac: DEFAULT_PROMINENCE_FRAC,
        settle_time: None,
        growth_window: 1.0,
        growth_rate_fraction: 0.8,
        grid_cap: DEFAULT_GRID_CAP,
    }
}

fn window(t_end: f64, sample_interval: f64) -> IntegratorConfig {
    IntegratorConfig {
        t_end,
        sample_interval,
        ..IntegratorConfig::default()
    }
}

fn normalized(n0: f64, theta: f64) -> ParamSet {
    ParamSet::Normalized(NormalizedParams {
        n0,
        theta,
        ..NormalizedParams::default()
    })
}

fn comparison_pair(label: &str, n0: f64, theta: f64) -> SweepSpec {
    let mut analyses = vec![AnalysisKind::PulseMetrics];
    if theta == 0.0 {
        analyses.push(AnalysisKind::Conservation);
    }
    spec(
        label,
        vec![ModelVariant::TradNorm, ModelVariant::SepNorm],
        normalized(n0, theta),
        Vec::new(),
        window(20.0, 0.01),
        analyses,
    )
}

fn pulse_family(label: &str, delta: f64) -> SweepSpec {
    let mut analyses = vec![AnalysisKind::PulseMetrics];
    if delta == 0.0 {
        analyses.push(AnalysisKind::Conservation);
    }
    let mut s = spec(
        label,
        vec![ModelVariant::SepNorm],
        ParamSet::Physical(PhysicalParams {
            n_total: 1e12,
            mu0: fig6_mu0_values()[0],
            delta,
            ..PhysicalParams::default()
        }),
        vec![Axis {
            name: "mu0".into(),
            values: fig6_mu0_values(),
        }],
        window(40.0, 0.002),
        analyses,
    );
    s.time_base = TimeBase::Threshold;
    s
}

pub fn figure_preset(name: &str) -> Result<SweepSpec, SweepError> {
    let s = match name {
        "fig1" => spec(
            name,
            vec![ModelVariant::TradNorm],
            normalized(FIG1_N0_VALUES[0], 0.0),
            vec![Axis {
                name: "N0".into(),
                values: FIG1_N0_VALUES.to_vec(),
            }],
            window(20.0, 0.01),
            vec![AnalysisKind::GrowthCurve, AnalysisKind::Conservation],
        ),
        "fig2" => comparison_pair(name, 0.05, 0.0),
        "fig3" => comparison_pair(name, 0.01, 0.0),
        "fig4" => comparison_pair(name, 0.05, 0.045),
        "fig5" => comparison_pair(name, 0.01, 0.04),
        "fig6" => pulse_family(name, 0.0),
        "fig7" => pulse_family(name, 4e5),
        "fig8" => {
            let mut s = spec(
                name,
                vec![ModelVariant::PulsNorm],
                ParamSet::Normalized(NormalizedParams {
                    n0: 0.05,
                    theta: 0.4,
                    i0: 0.0,
                    gamma_tilde: 0.1,
                    ..NormalizedParams::default()
                }),
                Vec::new(),
                window(400.0, 0.05),
                vec![AnalysisKind::PulseTrain, AnalysisKind::Outflow],
            );
            s.initial_state = InitialRule::PulsatingPerturbed {
                relative_offset: 0.1,
            };
            s
        }
        other => return Err(SweepError::UnknownPreset(other.to_string())),
    };
    Ok(s)
}
