//! Configurations of the desk runs used by the examples, the verification
//! suite and the acceptance tests.

use std::f64::consts::PI;

use super::config::{
    DiagnosticsSection, ExperimentConfig, GeometrySection, LiftSection, MobilitySection,
    SolverSection,
};
use super::initial::InitialConditionSpec;
use crate::diagnostics::SupportMetric;
use crate::mobility::EntropyKind;
use crate::solver::StepperKind;

fn base(modes: usize, n: f64, gamma: f64, final_time: f64, initial: InitialConditionSpec) -> ExperimentConfig {
    ExperimentConfig {
        seed: 0,
        output_dir: None,
        geometry: GeometrySection {
            lengths: vec![2.0 * PI],
            modes: vec![modes],
            points: None,
        },
        mobility: MobilitySection {
            n,
            s: 0.5,
            epsilon: 1e-6,
            delta: 1e-6,
            gamma,
            alpha: None,
        },
        lift: LiftSection::default(),
        solver: SolverSection {
            final_time,
            stepper: StepperKind::Imex,
            dt_initial: None,
            dt_min: None,
            safety: None,
            rtol: None,
            atol: None,
            snapshot_stride: None,
            linear_mode: false,
            entropy: EntropyKind::Regularized,
            write_snapshots: false,
            max_steps: None,
        },
        initial,
        diagnostics: DiagnosticsSection::default(),
        sweep: None,
    }
}

/// Compact bump of radius `pi/2` on `[0, 2 pi]`, `n = 1.5`, `s = 1/2`,
/// `eps = delta = 1e-6`, integrated to `T = 0.5`.
pub fn reference(modes: usize, gamma: f64) -> ExperimentConfig {
    let mut c = base(
        modes,
        1.5,
        gamma,
        0.5,
        InitialConditionSpec::CompactBump {
            amplitude: 1.0,
            radius: PI / 2.0,
            center: None,
        },
    );
    c.solver.write_snapshots = true;
    c.diagnostics.threshold = Some(1e-3);
    c
}

/// Narrow bump of radius `1/4` spreading over `T = 40`, for fitting the
/// front exponent at mobility exponent `n`.
pub fn propagation(n: f64) -> ExperimentConfig {
    let mut c = base(
        128,
        n,
        1e-8,
        40.0,
        InitialConditionSpec::CompactBump {
            amplitude: 1.0,
            radius: 0.25,
            center: None,
        },
    );
    c.lift.theta1 = Some(0.6);
    c.solver.entropy = EntropyKind::G0;
    c.diagnostics.threshold = Some(2e-3);
    c.diagnostics.metric = SupportMetric::Radial;
    c.diagnostics.fit_r0 = Some(0.0);
    c
}

/// Profile `((1 - (x - pi)^2)_+)^p` with `p` equal to `factor` times the
/// flatness exponent `2(s+1)/n` at `n = 1.3`.
pub fn waiting_time(factor: f64) -> ExperimentConfig {
    let n = 1.3;
    let mut c = base(
        256,
        n,
        1e-8,
        0.2,
        InitialConditionSpec::WaitingTimeProfile {
            amplitude: 1.0,
            radius: 1.0,
            exponent: Some(factor * 3.0 / n),
            center: None,
        },
    );
    c.lift.theta1 = Some(0.6);
    c.solver.entropy = EntropyKind::G0;
    c.solver.snapshot_stride = Some(1e-3);
    c.diagnostics.threshold = Some(1e-2);
    c
}
