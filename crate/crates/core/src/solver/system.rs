use std::sync::Arc;

use ndarray::{Array3, Zip};

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::mobility::MobilityParams;
use crate::spectral::{multiplier, project_on_gradients, EigenBasis, SpectralField};

/// Right-hand side of the Galerkin system together with by-products of its
/// evaluation that the integrator and the monitors reuse.
#[derive(Debug)]
pub(crate) struct Evaluation {
    pub rhs: Array3<f64>,
    /// `int f_{eps,delta}(u) |grad p|^2` by grid quadrature.
    pub flux_dissipation: f64,
    /// Largest value of `f_{eps,delta}` on the grid.
    pub max_mobility: f64,
    pub min_u: f64,
    pub max_u: f64,
}

/// Precomputed multipliers for `dc/dt = -gamma Lambda^{s+1} c - P[f(u) grad Lambda^s c]`.
#[derive(Debug)]
pub(crate) struct GalerkinSystem {
    basis: Arc<EigenBasis>,
    params: MobilityParams,
    lam_s: Array3<f64>,
    lam_s1: Array3<f64>,
    lam_2s1: Array3<f64>,
    linear_mode: bool,
    /// Whether `rhs` carries the `gamma` term (false when it is integrated exactly).
    include_gamma: bool,
}

impl GalerkinSystem {
    pub fn new(basis: Arc<EigenBasis>, cfg: &SolverConfig, include_gamma: bool) -> Self {
        let s = cfg.s();
        let power = |r: f64| basis.eigenvalues().mapv(|l| multiplier(l, r));
        Self {
            lam_s: power(s),
            lam_s1: power(s + 1.0),
            lam_2s1: power(2.0 * s + 1.0),
            params: cfg.mobility,
            linear_mode: cfg.linear_mode,
            include_gamma,
            basis,
        }
    }

    pub fn basis(&self) -> &Arc<EigenBasis> {
        &self.basis
    }

    /// `lambda^{s+1}` per mode.
    pub fn lam_s1(&self) -> &Array3<f64> {
        &self.lam_s1
    }

    pub fn max_lam_s1(&self) -> f64 {
        self.lam_s1.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    /// `sum lambda^{s+1} c^2`, the squared `H^{s+1}` seminorm.
    pub fn hs1_energy(&self, c: &Array3<f64>) -> f64 {
        weighted_square(&self.lam_s1, c)
    }

    /// `gamma sum lambda^{2s+1} c^2 = int gamma |grad p|^2`.
    pub fn gamma_dissipation(&self, c: &Array3<f64>) -> f64 {
        if self.params.gamma == 0.0 {
            0.0
        } else {
            self.params.gamma * weighted_square(&self.lam_2s1, c)
        }
    }

    /// `sum lambda^s c^2`, the squared `H^s` seminorm.
    pub fn hs_energy(&self, c: &Array3<f64>) -> f64 {
        weighted_square(&self.lam_s, c)
    }

    pub fn evaluate(&self, c: &Array3<f64>, t: f64) -> Result<Evaluation> {
        let transforms = self.basis.transforms();
        let u = transforms.synthesis(c);
        let (mut min_u, mut max_u) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &u {
            min_u = min_u.min(v);
            max_u = max_u.max(v);
        }
        let blow_up = |u: &Array3<f64>| Error::BlowUp {
            t,
            max_abs: u.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        };
        if !(min_u.is_finite() && max_u.is_finite()) {
            return Err(blow_up(&u));
        }
        if self.linear_mode {
            return Ok(self.finish(Array3::zeros(c.raw_dim()), c, 0.0, 0.0, min_u, max_u));
        }
        let p = c * &self.lam_s;
        let mobility = u.mapv(|z| self.params.degenerate_part(z));
        let max_mobility = mobility.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut dissipation = 0.0;
        let mut flux = Vec::with_capacity(self.basis.dimension());
        for axis in 0..self.basis.dimension() {
            let mut w = transforms.derivative_synthesis(&p, axis);
            Zip::from(&mut w).and(&mobility).for_each(|w, &f| {
                dissipation += f * *w * *w;
                *w *= f;
            });
            flux.push(w);
        }
        let dissipation = dissipation * self.basis.geometry().node_weight();
        let mut rhs = project_on_gradients(&self.basis, &flux);
        rhs.mapv_inplace(|v| -v);
        if !dissipation.is_finite() || rhs.iter().any(|v| !v.is_finite()) {
            return Err(blow_up(&u));
        }
        Ok(self.finish(rhs, c, dissipation, max_mobility, min_u, max_u))
    }

    fn finish(
        &self,
        mut rhs: Array3<f64>,
        c: &Array3<f64>,
        flux_dissipation: f64,
        max_mobility: f64,
        min_u: f64,
        max_u: f64,
    ) -> Evaluation {
        // the mean mode has zero gradient; keep it exactly zero
        rhs[[0, 0, 0]] = 0.0;
        if self.include_gamma && self.params.gamma > 0.0 {
            let g = self.params.gamma;
            Zip::from(&mut rhs)
                .and(c)
                .and(&self.lam_s1)
                .for_each(|r, &c, &l| *r -= g * l * c);
        }
        Evaluation {
            rhs,
            flux_dissipation,
            max_mobility,
            min_u,
            max_u,
        }
    }
}

fn weighted_square(w: &Array3<f64>, c: &Array3<f64>) -> f64 {
    Zip::from(w).and(c).fold(0.0, |acc, &w, &c| acc + w * c * c)
}

/// Time derivative of the Galerkin coefficients at `u`, including the
/// `gamma` term.
pub fn rhs(u: &SpectralField, cfg: &SolverConfig) -> Result<SpectralField> {
    if u.basis().geometry() != &cfg.geometry {
        return Err(Error::Config("field does not live on the configured geometry".into()));
    }
    let system = GalerkinSystem::new(Arc::clone(u.basis()), cfg, true);
    let e = system.evaluate(u.coefficients(), 0.0)?;
    SpectralField::new(Arc::clone(u.basis()), e.rhs)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::{build_basis, DomainGeometry};

    fn config(geometry: DomainGeometry, gamma: f64) -> SolverConfig {
        let p = MobilityParams::new(1.5, 0.5, geometry.dimension(), 1e-3, 1e-3, gamma).unwrap();
        SolverConfig::new(geometry, p, 1.0)
    }

    #[test]
    fn linear_mode_is_diagonal() {
        let g = DomainGeometry::interval(PI, 16).unwrap();
        let mut cfg = config(g.clone(), 0.7);
        cfg.linear_mode = true;
        let basis = build_basis(g);
        for k in [0, 1, 5, 15] {
            let u = SpectralField::mode(Arc::clone(&basis), [k, 0, 0]).unwrap();
            let r = rhs(&u, &cfg).unwrap();
            let expected = -0.7 * (k as f64).powi(2).powf(1.5);
            for (idx, &v) in r.coefficients().indexed_iter() {
                let e = if idx.0 == k { expected } else { 0.0 };
                assert!((v - e).abs() < 1e-12 * (1.0 + e.abs()), "k={k} idx={idx:?}");
            }
        }
    }

    #[test]
    fn constant_state_is_stationary() {
        let g = DomainGeometry::dealiased(vec![1.0, 2.0], vec![6, 5]).unwrap();
        let cfg = config(g.clone(), 1e-2);
        let u = SpectralField::constant(build_basis(g), 0.8);
        let r = rhs(&u, &cfg).unwrap();
        assert!(r.coefficients().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn mean_mode_is_exactly_zero() {
        let g = DomainGeometry::dealiased(vec![1.0, 1.3], vec![7, 6]).unwrap();
        let cfg = config(g.clone(), 1e-3);
        let basis = build_basis(g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut u = crate::spectral::random_field(&basis, &mut rng, 1.5);
        u.coefficients_mut()[[0, 0, 0]] = 3.0;
        assert_eq!(rhs(&u, &cfg).unwrap().coefficient([0, 0, 0]), 0.0);
    }

    /// Assembles `A_jk = int f(u) phi_j' phi_k'` with a fine midpoint rule and
    /// applies it to `lambda^s c`.
    fn dense_oracle(c: &[f64], l: f64, p: &MobilityParams, quad: usize) -> Vec<f64> {
        let n = c.len();
        let norm = |k: usize| if k == 0 { 1.0 / l.sqrt() } else { (2.0 / l).sqrt() };
        let wn = |k: usize| k as f64 * PI / l;
        let h = l / quad as f64;
        let mut a = vec![vec![0.0; n]; n];
        for q in 0..quad {
            let x = (q as f64 + 0.5) * h;
            let u: f64 = (0..n).map(|k| c[k] * norm(k) * (wn(k) * x).cos()).sum();
            let f = p.degenerate_part(u);
            let dphi: Vec<f64> = (0..n).map(|k| -norm(k) * wn(k) * (wn(k) * x).sin()).collect();
            for j in 0..n {
                for k in 0..n {
                    a[j][k] += f * dphi[j] * dphi[k] * h;
                }
            }
        }
        (0..n)
            .map(|j| {
                let flux: f64 = (0..n).map(|k| a[j][k] * wn(k).powi(2).powf(p.s) * c[k]).sum();
                -flux - p.gamma * wn(j).powi(2).powf(p.s + 1.0) * c[j]
            })
            .collect()
    }

    #[test]
    fn agrees_with_dense_galerkin_assembly() {
        let l = 2.0;
        let n = 8;
        // generous quadrature so the pseudospectral product is essentially exact
        let g = DomainGeometry::new(vec![l], vec![n], vec![64]).unwrap();
        let cfg = config(g.clone(), 2e-3);
        let basis = build_basis(g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let mut c: Vec<f64> = (0..n).map(|k| rng.gen_range(-0.2..0.2) / (1.0 + k as f64)).collect();
            c[0] = 2.0 * l.sqrt();
            let u = SpectralField::from_flat(Arc::clone(&basis), c.clone()).unwrap();
            let got = rhs(&u, &cfg).unwrap().to_flat();
            let oracle = dense_oracle(&c, l, &cfg.mobility, 640);
            let scale = oracle.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (a, b) in got.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8 * scale, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn flux_dissipation_matches_energy_rate() {
        // d/dt sum lambda^s c^2 = -2 (flux + gamma terms), exactly at the discrete level
        let g = DomainGeometry::dealiased(vec![1.5, 1.0], vec![8, 6]).unwrap();
        let cfg = config(g.clone(), 1e-2);
        let basis = build_basis(g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut u = crate::spectral::random_field(&basis, &mut rng, 2.0);
        u.coefficients_mut()[[0, 0, 0]] = 2.0;
        let system = GalerkinSystem::new(Arc::clone(&basis), &cfg, true);
        let e = system.evaluate(u.coefficients(), 0.0).unwrap();
        let rate: f64 = Zip::from(&system.lam_s)
            .and(u.coefficients())
            .and(&e.rhs)
            .fold(0.0, |a, &l, &c, &r| a + 2.0 * l * c * r);
        let predicted = -2.0 * (e.flux_dissipation + system.gamma_dissipation(u.coefficients()));
        assert!((rate - predicted).abs() < 1e-12 * predicted.abs(), "{rate} vs {predicted}");
    }
}
