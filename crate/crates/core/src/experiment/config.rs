use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::SupportMetric;
use crate::error::{Error, Result};
use crate::mobility::{EntropyKind, LiftParams, MobilityParams};
use crate::solver::{SolverConfig, StepperKind};
use crate::spectral::DomainGeometry;

use super::initial::InitialConditionSpec;

/// Largest number of rows a sweep may expand to unless `max_runs` says otherwise.
pub const DEFAULT_MAX_RUNS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub geometry: GeometrySection,
    pub mobility: MobilitySection,
    #[serde(default)]
    pub lift: LiftSection,
    pub solver: SolverSection,
    pub initial: InitialConditionSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub lengths: Vec<f64>,
    pub modes: Vec<usize>,
    /// Quadrature points per axis; `ceil(3N/2)` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilitySection {
    pub n: f64,
    pub s: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub gamma: f64,
    /// Degeneracy exponent; half a unit above its lower bound when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub final_time: f64,
    #[serde(default)]
    pub stepper: StepperKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_initial: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<f64>,
    #[serde(default)]
    pub linear_mode: bool,
    #[serde(default = "default_entropy")]
    pub entropy: EntropyKind,
    #[serde(default = "default_true")]
    pub write_snapshots: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
}

fn default_entropy() -> EntropyKind {
    EntropyKind::Regularized
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Absolute support threshold above the lift level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Threshold as a fraction of `max |u0|`; used when `threshold` is absent
    /// (default `1e-6`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_relative: Option<f64>,
    #[serde(default)]
    pub metric: SupportMetric,
    /// Radius of the initial support ball; the measured `d(0)` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Offset used by the propagation fit; `0` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_r0: Option<f64>,
    /// Earliest time admitted to the propagation fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_start: Option<f64>,
    /// Radial tolerance of the waiting-time detector; twice the grid spacing
    /// when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_r: Option<f64>,
    /// Inner radii of the local entropy cutoffs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cutoff_inner: Vec<f64>,
    /// Transition widths of the local entropy cutoffs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cutoff_width: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_levels: Option<usize>,
    /// Flatness exponent of the density; `2(s+1)/n` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_exponent: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_runs: Option<usize>,
}

/// One point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: f64,
    pub s: f64,
    pub modes: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let json = serde_json::to_string(&c).expect("configuration serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn geometry(&self) -> Result<DomainGeometry> {
        let g = &self.geometry;
        match &g.points {
            Some(p) => DomainGeometry::new(g.lengths.clone(), g.modes.clone(), p.clone()),
            None => DomainGeometry::dealiased(g.lengths.clone(), g.modes.clone()),
        }
    }

    pub fn mobility_params(&self) -> Result<MobilityParams> {
        let m = &self.mobility;
        let p = MobilityParams::new(m.n, m.s, self.geometry.lengths.len(), m.epsilon, m.delta, m.gamma)?;
        match m.alpha {
            Some(a) => p.with_alpha(a),
            None => Ok(p),
        }
    }

    pub fn lift_params(&self, p: &MobilityParams) -> Result<LiftParams> {
        let d = LiftParams::default_for(p);
        let l = LiftParams {
            theta1: self.lift.theta1.unwrap_or(d.theta1),
            theta2: self.lift.theta2.unwrap_or(d.theta2),
        };
        l.validate(p)?;
        Ok(l)
    }

    /// Solver configuration without support tracking.
    pub fn solver_config(&self) -> Result<SolverConfig> {
        let geometry = self.geometry()?;
        let mobility = self.mobility_params()?;
        let s = &self.solver;
        let mut cfg = SolverConfig::new(geometry, mobility, s.final_time);
        cfg.stepper = s.stepper;
        cfg.linear_mode = s.linear_mode;
        cfg.entropy = s.entropy;
        if let Some(v) = s.dt_initial {
            cfg.dt_initial = v;
        }
        if let Some(v) = s.dt_min {
            cfg.dt_min = v;
        }
        if let Some(v) = s.safety {
            cfg.safety = v;
        }
        if let Some(v) = s.rtol {
            cfg.rtol = v;
        }
        if let Some(v) = s.atol {
            cfg.atol = v;
        }
        if let Some(v) = s.snapshot_stride {
            cfg.snapshot_stride = v;
        }
        if let Some(v) = s.max_steps {
            cfg.max_steps = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver_config()?;
        let p = self.mobility_params()?;
        self.lift_params(&p)?;
        self.initial.validate(self.geometry.lengths.len())?;
        let d = &self.diagnostics;
        if d.cutoff_inner.is_empty() != d.cutoff_width.is_empty() {
            return Err(Error::Config(
                "cutoff_inner and cutoff_width must be given together".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            self.sweep_points_of(sweep)?;
        }
        Ok(())
    }

    /// Cartesian product of the sweep axes, first axis outermost, in the
    /// order `n, s, modes, epsilon, delta, gamma`.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("configuration has no [sweep] section".into()))?;
        self.sweep_points_of(sweep)
    }

    fn sweep_points_of(&self, sweep: &SweepSection) -> Result<Vec<SweepPoint>> {
        fn axis<T: Copy>(name: &str, v: &Option<Vec<T>>, fixed: T) -> Result<Vec<T>> {
            match v {
                None => Ok(vec![fixed]),
                Some(v) if v.is_empty() => Err(Error::Config(format!("sweep axis `{name}` is empty"))),
                Some(v) => Ok(v.clone()),
            }
        }
        let m = &self.mobility;
        let any_axis = [
            sweep.n.is_some(),
            sweep.s.is_some(),
            sweep.modes.is_some(),
            sweep.epsilon.is_some(),
            sweep.delta.is_some(),
            sweep.gamma.is_some(),
        ]
        .contains(&true);
        if !any_axis {
            return Err(Error::Config("sweep defines no axis".into()));
        }
        let ns = axis("n", &sweep.n, m.n)?;
        let ss = axis("s", &sweep.s, m.s)?;
        let modes = axis("modes", &sweep.modes, self.geometry.modes[0])?;
        let eps = axis("epsilon", &sweep.epsilon, m.epsilon)?;
        let dls = axis("delta", &sweep.delta, m.delta)?;
        let gms = axis("gamma", &sweep.gamma, m.gamma)?;
        let total = ns.len() * ss.len() * modes.len() * eps.len() * dls.len() * gms.len();
        let cap = sweep.max_runs.unwrap_or(DEFAULT_MAX_RUNS);
        if total > cap {
            return Err(Error::Config(format!("sweep expands to {total} runs, cap is {cap}")));
        }
        let mut out = Vec::with_capacity(total);
        for &n in &ns {
            for &s in &ss {
                for &k in &modes {
                    for &epsilon in &eps {
                        for &delta in &dls {
                            for &gamma in &gms {
                                out.push(SweepPoint {
                                    n,
                                    s,
                                    modes: k,
                                    epsilon,
                                    delta,
                                    gamma,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copy of this configuration at one sweep point, without the sweep.
    pub fn at_point(&self, p: &SweepPoint) -> Self {
        let mut c = self.clone();
        c.sweep = None;
        c.mobility.n = p.n;
        c.mobility.s = p.s;
        c.mobility.epsilon = p.epsilon;
        c.mobility.delta = p.delta;
        c.mobility.gamma = p.gamma;
        let sweeps_modes = self.sweep.as_ref().is_some_and(|s| s.modes.is_some());
        if sweeps_modes {
            c.geometry.modes = vec![p.modes; c.geometry.modes.len()];
            c.geometry.points = None;
        }
        c
    }
}
