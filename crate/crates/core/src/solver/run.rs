use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{SolverConfig, SolverState};
use super::stepper::Integrator;
use crate::diagnostics::{support_radius_above, SupportSeries};
use crate::error::{Error, Result};
use crate::mobility::entropy_integral;
use crate::spectral::{build_basis, GridField, SpectralField};

/// Sampled time series of a run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub times: Vec<f64>,
    /// `int u`.
    pub mass: Vec<f64>,
    /// `||u||^2_{H^s}`.
    pub energy: Vec<f64>,
    pub entropy: Vec<f64>,
    /// Cumulative `int_0^t ||u||^2_{H^{s+1}}`.
    pub dissipation: Vec<f64>,
    /// Cumulative `int_0^t int f_{eps,delta}(u) |grad p|^2`.
    pub flux_dissipation: Vec<f64>,
    /// Cumulative `int_0^t int gamma |grad p|^2`.
    pub gamma_dissipation: Vec<f64>,
    /// Support radius per sample; NaN when tracking is disabled.
    pub support_radius: Vec<f64>,
    pub min_u: Vec<f64>,
    pub max_u: Vec<f64>,
    /// Coefficients at every sample when requested.
    pub snapshots: Vec<SpectralField>,
    pub final_state: SpectralField,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest relative deviation of the mass from its initial value.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        let scale = if m0 != 0.0 { m0.abs() } else { 1.0 };
        self.mass
            .iter()
            .fold(0.0, |a, m| a.max((m - m0).abs() / scale))
    }

    /// Largest increase of the energy between consecutive samples, relative
    /// to the initial energy.
    pub fn max_energy_increase(&self) -> f64 {
        let scale = if self.energy[0] > 0.0 { self.energy[0] } else { 1.0 };
        self.energy
            .windows(2)
            .fold(0.0, |a, w| a.max((w[1] - w[0]) / scale))
    }

    pub fn support_series(&self) -> Result<SupportSeries> {
        if self.support_radius.iter().any(|r| r.is_nan()) {
            return Err(Error::Config("support tracking was disabled for this run".into()));
        }
        SupportSeries::new(self.times.clone(), self.support_radius.clone(), f64::NAN)
    }
}

/// Residuals of the energy and entropy identities, normalized by the
/// initial energy and entropy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `|E(T) + 2 int int f_{eps,delta,gamma} |grad p|^2 - E(0)| / E(0)`.
    pub energy_residual: f64,
    /// `|S(T) + int ||u||^2_{H^{s+1}} - S(0)| / |S(0)|`; NaN for infinite entropy.
    pub entropy_residual: f64,
}

pub fn verify_identities(record: &RunRecord, _cfg: &SolverConfig) -> IdentityReport {
    let last = record.len() - 1;
    let normalized = |residual: f64, initial: f64| {
        if initial != 0.0 {
            residual / initial.abs()
        } else {
            residual
        }
    };
    let e0 = record.energy[0];
    let energy_residual = normalized(
        (record.energy[last]
            + 2.0 * (record.flux_dissipation[last] + record.gamma_dissipation[last])
            - e0)
            .abs(),
        e0,
    );
    let s0 = record.entropy[0];
    let entropy_residual = if s0.is_finite() && record.entropy[last].is_finite() {
        normalized(
            (record.entropy[last] + record.dissipation[last] - s0).abs(),
            s0,
        )
    } else {
        f64::NAN
    };
    IdentityReport {
        energy_residual,
        entropy_residual,
    }
}

/// Integrates the regularized problem from nodal data `u0` (already lifted)
/// to `cfg.final_time`, sampling every `cfg.snapshot_stride`.
pub fn run(u0: &GridField, cfg: &SolverConfig) -> Result<RunRecord> {
    cfg.validate()?;
    if u0.geometry() != &cfg.geometry {
        return Err(Error::Config("initial datum does not live on the configured geometry".into()));
    }
    let basis = build_basis(cfg.geometry.clone());
    let c0 = u0.to_coefficients(&basis)?;
    run_from(c0, cfg)
}

/// As [`run`], starting from coefficients.
pub fn run_from(u0: SpectralField, cfg: &SolverConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let basis = Arc::clone(u0.basis());
    let mut integrator = Integrator::new(Arc::clone(&basis), cfg)?;
    let mut state = SolverState::new(u0, cfg.dt_initial);
    let mut rec = RunRecord {
        times: Vec::new(),
        mass: Vec::new(),
        energy: Vec::new(),
        entropy: Vec::new(),
        dissipation: Vec::new(),
        flux_dissipation: Vec::new(),
        gamma_dissipation: Vec::new(),
        support_radius: Vec::new(),
        min_u: Vec::new(),
        max_u: Vec::new(),
        snapshots: Vec::new(),
        final_state: state.u.clone(),
        accepted_steps: 0,
        rejected_steps: 0,
        warnings: Vec::new(),
    };
    let mut totals = [0.0; 3];
    let mut warned = false;
    for target in cfg.sample_times() {
        while state.t < target {
            if state.accepted >= cfg.max_steps {
                return Err(Error::Numeric(format!(
                    "step budget of {} exhausted at t = {}",
                    cfg.max_steps, state.t
                )));
            }
            let r = integrator.step(&mut state, target)?;
            totals[0] += r.hs1_dissipation;
            totals[1] += r.flux_dissipation;
            totals[2] += r.gamma_dissipation;
        }
        let grid = state.u.to_grid();
        let (lo, hi) = (grid.min(), grid.max());
        if lo <= 0.0 && !warned {
            warned = true;
            rec.warnings.push(format!(
                "positivity lost at t = {}: min u = {lo:e}",
                state.t
            ));
        }
        let system = integrator.system();
        rec.times.push(state.t);
        rec.mass.push(state.u.mass());
        rec.energy.push(system.hs_energy(state.u.coefficients()));
        rec.entropy.push(entropy_integral(&grid, &cfg.mobility, cfg.entropy)?);
        rec.dissipation.push(totals[0]);
        rec.flux_dissipation.push(totals[1]);
        rec.gamma_dissipation.push(totals[2]);
        rec.support_radius.push(match &cfg.support {
            Some(s) => support_radius_above(&grid, s.baseline, s.threshold, s.metric)?,
            None => f64::NAN,
        });
        rec.min_u.push(lo);
        rec.max_u.push(hi);
        if cfg.keep_snapshots {
            rec.snapshots.push(state.u.clone());
        }
    }
    rec.accepted_steps = state.accepted;
    rec.rejected_steps = state.rejected;
    rec.final_state = state.u;
    Ok(rec)
}
