use std::sync::Arc;

use serde::Serialize;

use super::cutoff::{distance, CutoffFunction};
use crate::error::{Error, Result};
use crate::spectral::{EigenBasis, GridField};

/// Norms entering the tail estimate of `(-Delta)^alpha psi` for `psi`
/// supported outside the ball of radius `S`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailEstimate {
    pub order: f64,
    pub delta: f64,
    /// `||(-Delta)^alpha psi||` over the box.
    pub full_norm: f64,
    /// `||(-Delta)^alpha psi||` over `{|x - center| > S + delta}`.
    pub far_norm: f64,
    pub psi_norm: f64,
    /// `delta^{2 alpha} (full - far) / ||psi||`; zero for `psi = 0`.
    pub constant: f64,
}

/// Evaluates the tail estimate for nodal `psi` vanishing on `{|x| <= S}`.
pub fn tail_estimate_check(
    psi: &GridField,
    basis: &Arc<EigenBasis>,
    inner_radius: f64,
    alpha: f64,
    delta: f64,
) -> Result<TailEstimate> {
    let g = psi.geometry();
    let outer = g.inscribed_radius();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1) (got {alpha})")));
    }
    if !(delta > 0.0 && inner_radius + delta < outer) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, {}) (got {delta})",
            outer - inner_radius
        )));
    }
    let center = g.center();
    let inside = psi.values().indexed_iter().any(|((i, j, k), &v)| {
        v != 0.0 && distance(&g.node_coordinates([i, j, k]), &center) <= inner_radius
    });
    if inside {
        return Err(Error::Domain(format!(
            "psi does not vanish on the ball of radius {inner_radius}"
        )));
    }
    let w = psi.to_coefficients(basis)?.frac_laplacian(alpha)?.to_grid();
    let sq = w.map(|v| v * v);
    let full_norm = sq.integral().sqrt();
    let far_norm = sq
        .integral_where(|x| distance(x, &center) > inner_radius + delta)
        .sqrt();
    let psi_norm = psi.l2_norm();
    let constant = if psi_norm > 0.0 {
        delta.powf(2.0 * alpha) * (full_norm - far_norm) / psi_norm
    } else {
        0.0
    };
    Ok(TailEstimate {
        order: alpha,
        delta,
        full_norm,
        far_norm,
        psi_norm,
        constant,
    })
}

/// [`tail_estimate_check`] over `delta = (R - S) 2^{-k}`, `k = 1..=levels`.
pub fn tail_constant_sweep(
    psi: &CutoffFunction,
    basis: &Arc<EigenBasis>,
    alpha: f64,
    levels: usize,
) -> Result<Vec<TailEstimate>> {
    let gap = psi.values.geometry().inscribed_radius() - psi.inner_radius;
    (1..=levels)
        .map(|k| {
            let delta = gap * 0.5f64.powi(k as i32);
            tail_estimate_check(&psi.values, basis, psi.inner_radius, alpha, delta)
        })
        .collect()
}
