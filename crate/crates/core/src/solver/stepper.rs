//! Adaptive Bogacki-Shampine 3(2) with an optional Lawson integrating factor
//! for the diagonal `-gamma lambda^{s+1}` term.

use std::sync::Arc;

use ndarray::{Array3, Zip};

use super::config::{SolverConfig, SolverState, StepperKind};
use super::system::{Evaluation, GalerkinSystem};
use crate::error::{Error, Result};
use crate::spectral::EigenBasis;

/// Half-width of the BS3 stability interval on the negative real axis.
const STABILITY_RADIUS: f64 = 2.5;
const MAX_GROWTH: f64 = 5.0;
const MIN_SHRINK: f64 = 0.2;
const CONTROLLER_SAFETY: f64 = 0.9;

/// Integrals of the monitored rates over one accepted step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// `int int f_{eps,delta}(u) |grad p|^2`.
    pub flux_dissipation: f64,
    /// `int gamma ||u||^2_{H^{2s+1}}`.
    pub gamma_dissipation: f64,
    /// `int ||u||^2_{H^{s+1}}`.
    pub hs1_dissipation: f64,
}

pub struct Integrator {
    system: GalerkinSystem,
    /// Diagonal of the exactly integrated part, when present.
    linear: Option<Array3<f64>>,
    include_gamma: bool,
    max_rate: f64,
    safety: f64,
    rtol: f64,
    atol: f64,
    dt_min: f64,
    fsal: Option<Evaluation>,
}

impl Integrator {
    pub fn new(basis: Arc<EigenBasis>, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if basis.geometry() != &cfg.geometry {
            return Err(Error::Config("basis does not match the configured geometry".into()));
        }
        let gamma = cfg.mobility.gamma;
        let integrate_gamma = cfg.stepper == StepperKind::Imex && gamma > 0.0;
        let system = GalerkinSystem::new(basis, cfg, !integrate_gamma);
        let linear = integrate_gamma.then(|| system.lam_s1().mapv(|l| -gamma * l));
        Ok(Self {
            max_rate: system.max_lam_s1(),
            include_gamma: !integrate_gamma,
            system,
            linear,
            safety: cfg.safety,
            rtol: cfg.rtol,
            atol: cfg.atol,
            dt_min: cfg.dt_min,
            fsal: None,
        })
    }

    pub fn basis(&self) -> &Arc<EigenBasis> {
        self.system.basis()
    }

    pub(crate) fn system(&self) -> &GalerkinSystem {
        &self.system
    }

    /// Largest step the explicit part tolerates at the current state.
    fn stability_limit(&self, e: &Evaluation) -> f64 {
        let mut rate = e.max_mobility;
        if self.include_gamma {
            rate += self.system.gamma();
        }
        rate *= self.max_rate;
        if rate > 0.0 {
            self.safety * STABILITY_RADIUS / rate
        } else {
            f64::INFINITY
        }
    }

    /// `x * exp(theta h L)`, or `x` without an integrating factor.
    fn propagate(&self, x: &Array3<f64>, theta_h: f64) -> Array3<f64> {
        match &self.linear {
            None => x.clone(),
            Some(l) => {
                let mut out = x.clone();
                Zip::from(&mut out).and(l).for_each(|o, &l| *o *= (theta_h * l).exp());
                out
            }
        }
    }

    /// Advances `state` by one accepted step without passing `t_limit`.
    pub fn step(&mut self, state: &mut SolverState, t_limit: f64) -> Result<StepReport> {
        let c = state.u.coefficients().clone();
        let first = match self.fsal.take() {
            Some(e) => e,
            None => self.system.evaluate(&c, state.t)?,
        };
        loop {
            let remaining = t_limit - state.t;
            let stable = self.stability_limit(&first);
            let mut h = state.dt.min(stable);
            let landing = h >= remaining;
            if landing {
                h = remaining;
            } else if h < self.dt_min {
                return Err(Error::Stiffness {
                    t: state.t,
                    dt: h,
                    dt_min: self.dt_min,
                });
            }
            let attempt = self.attempt(&c, &first, state.t, h)?;
            if attempt.error <= 1.0 {
                let factor = growth(attempt.error);
                let proposal = h * factor;
                state.dt = if h < state.dt { proposal.max(state.dt) } else { proposal };
                state.t = if landing { t_limit } else { state.t + h };
                state.accepted += 1;
                *state.u.coefficients_mut() = attempt.next;
                self.fsal = Some(attempt.last);
                return Ok(attempt.report);
            }
            state.rejected += 1;
            state.dt = h * shrink(attempt.error);
        }
    }

    fn attempt(&self, c: &Array3<f64>, k1: &Evaluation, t: f64, h: f64) -> Result<Attempt> {
        let sys = &self.system;
        // stage 2 at t + h/2
        let mut y = c.clone();
        y.scaled_add(0.5 * h, &k1.rhs);
        let c2 = self.propagate(&y, 0.5 * h);
        let k2 = sys.evaluate(&c2, t + 0.5 * h)?;
        // stage 3 at t + 3h/4
        let mut c3 = self.propagate(c, 0.75 * h);
        c3.scaled_add(0.75 * h, &self.propagate(&k2.rhs, 0.25 * h));
        let k3 = sys.evaluate(&c3, t + 0.75 * h)?;
        // third-order solution
        let k1_full = self.propagate(&k1.rhs, h);
        let k2_half = self.propagate(&k2.rhs, 0.5 * h);
        let k3_quarter = self.propagate(&k3.rhs, 0.25 * h);
        let mut next = self.propagate(c, h);
        next.scaled_add(2.0 / 9.0 * h, &k1_full);
        next.scaled_add(h / 3.0, &k2_half);
        next.scaled_add(4.0 / 9.0 * h, &k3_quarter);
        let k4 = sys.evaluate(&next, t + h)?;
        // embedded second-order difference
        let mut err = k1_full * (-5.0 / 72.0 * h);
        err.scaled_add(h / 12.0, &k2_half);
        err.scaled_add(h / 9.0, &k3_quarter);
        err.scaled_add(-h / 8.0, &k4.rhs);
        let scale = self.atol + self.rtol * l2(c).max(l2(&next));
        let error = l2(&err) / scale;
        if !error.is_finite() {
            return Err(Error::BlowUp {
                t,
                max_abs: k4.max_u.abs().max(k4.min_u.abs()),
            });
        }
        let weights = [2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0];
        let stages = [(c, k1), (&c2, &k2), (&c3, &k3)];
        let mut report = StepReport {
            dt: h,
            ..StepReport::default()
        };
        for (w, (state, e)) in weights.iter().zip(stages) {
            report.flux_dissipation += w * h * e.flux_dissipation;
            report.gamma_dissipation += w * h * sys.gamma_dissipation(state);
            report.hs1_dissipation += w * h * sys.hs1_energy(state);
        }
        Ok(Attempt {
            next,
            last: k4,
            error,
            report,
        })
    }
}

struct Attempt {
    next: Array3<f64>,
    last: Evaluation,
    error: f64,
    report: StepReport,
}

fn l2(x: &Array3<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn growth(error: f64) -> f64 {
    if error == 0.0 {
        MAX_GROWTH
    } else {
        (CONTROLLER_SAFETY * error.powf(-1.0 / 3.0)).clamp(MIN_SHRINK, MAX_GROWTH)
    }
}

fn shrink(error: f64) -> f64 {
    (CONTROLLER_SAFETY * error.powf(-1.0 / 3.0)).clamp(MIN_SHRINK, CONTROLLER_SAFETY)
}
