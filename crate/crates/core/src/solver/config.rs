use serde::{Deserialize, Serialize};

use crate::diagnostics::SupportMetric;
use crate::error::{Error, Result};
use crate::mobility::{EntropyKind, MobilityParams};
use crate::spectral::{DomainGeometry, SpectralField};

/// Time integration scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StepperKind {
    /// Bogacki-Shampine 3(2) on the full right-hand side.
    ExplicitAdaptive,
    /// Same tableau with the diagonal `gamma` term integrated exactly.
    #[default]
    Imex,
}

/// Support radius tracking during a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportTracking {
    /// Absolute threshold applied to `u - baseline`.
    pub threshold: f64,
    /// Uniform film level subtracted before thresholding.
    pub baseline: f64,
    pub metric: SupportMetric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub geometry: DomainGeometry,
    /// Mobility parameters; `mobility.s` is the fractional order.
    pub mobility: MobilityParams,
    pub final_time: f64,
    pub stepper: StepperKind,
    pub dt_initial: f64,
    pub dt_min: f64,
    /// Fraction of the explicit stability bound a step may use.
    pub safety: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Time between recorded samples.
    pub snapshot_stride: f64,
    /// Drop the nonlinear flux and keep only the `gamma` term.
    pub linear_mode: bool,
    pub entropy: EntropyKind,
    pub support: Option<SupportTracking>,
    /// Keep the coefficient vector of every sample in the record.
    pub keep_snapshots: bool,
    pub max_steps: u64,
}

/// Number of samples per run implied by the default stride.
pub const DEFAULT_SAMPLES: usize = 200;

impl SolverConfig {
    pub fn new(geometry: DomainGeometry, mobility: MobilityParams, final_time: f64) -> Self {
        Self {
            geometry,
            mobility,
            final_time,
            stepper: StepperKind::Imex,
            dt_initial: 1e-4 * final_time,
            dt_min: 1e-14 * final_time,
            safety: 0.8,
            rtol: 1e-7,
            atol: 1e-12,
            snapshot_stride: final_time / DEFAULT_SAMPLES as f64,
            linear_mode: false,
            entropy: EntropyKind::Regularized,
            support: None,
            keep_snapshots: false,
            max_steps: 200_000_000,
        }
    }

    pub fn s(&self) -> f64 {
        self.mobility.s
    }

    pub fn validate(&self) -> Result<()> {
        self.mobility.validate()?;
        if self.mobility.dimension != self.geometry.dimension() {
            return Err(Error::Config(format!(
                "mobility dimension {} does not match geometry dimension {}",
                self.mobility.dimension,
                self.geometry.dimension()
            )));
        }
        let positive = [
            ("final_time", self.final_time),
            ("dt_initial", self.dt_initial),
            ("dt_min", self.dt_min),
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("snapshot_stride", self.snapshot_stride),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive (got {v})")));
            }
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::Config(format!("safety must lie in (0, 1] (got {})", self.safety)));
        }
        if self.dt_min > self.dt_initial {
            return Err(Error::Config("dt_min exceeds dt_initial".into()));
        }
        if let Some(s) = &self.support {
            if !(s.threshold > 0.0 && s.threshold.is_finite()) {
                return Err(Error::Config("support threshold must be positive".into()));
            }
        }
        Ok(())
    }

    /// Sample times `0, stride, 2 stride, ...` ending exactly at `final_time`.
    pub fn sample_times(&self) -> Vec<f64> {
        let k = (self.final_time / self.snapshot_stride - 1e-9).ceil().max(1.0) as usize;
        let mut times: Vec<f64> = (0..k).map(|i| i as f64 * self.snapshot_stride).collect();
        times.push(self.final_time);
        times
    }
}

/// Integrator state.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub t: f64,
    pub u: SpectralField,
    pub accepted: u64,
    pub rejected: u64,
    /// Step size proposed for the next step.
    pub dt: f64,
}

impl SolverState {
    pub fn new(u: SpectralField, dt: f64) -> Self {
        Self {
            t: 0.0,
            u,
            accepted: 0,
            rejected: 0,
            dt,
        }
    }
}
