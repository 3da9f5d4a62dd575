use std::sync::Arc;

use serde::Serialize;

use super::cutoff::{build_cutoff, distance, CutoffFunction};
use crate::error::{Error, Result};
use crate::mobility::{entropy_g0, g0_at_zero};
use crate::solver::SolverConfig;
use crate::spectral::{EigenBasis, GridField, SpectralField};

/// Exponent of the sublinear term of the local entropy estimate,
/// `min{s/(2s+1), 1-(n-1)(s+1), (2ns-d(n-1))/(4s)}`.
pub fn local_entropy_exponent(n: f64, s: f64, dimension: usize) -> f64 {
    let d = dimension as f64;
    (s / (2.0 * s + 1.0))
        .min(1.0 - (n - 1.0) * (s + 1.0))
        .min((2.0 * n * s - d * (n - 1.0)) / (4.0 * s))
}

/// Term values of the local entropy inequality on the annuli
/// `{|x - center| > S}` and `{|x - center| > S + sigma}`, clipped to the box.
#[derive(Clone, Debug, Serialize)]
pub struct LocalEntropyReport {
    pub inner_radius: f64,
    pub width: f64,
    /// Exponent of the sublinear term.
    pub exponent: f64,
    /// `int_{|x|>S+sigma} G_0(u(T))`.
    pub final_entropy: f64,
    /// Same with `G_0(u) - G_0(0)`.
    pub final_entropy_excess: f64,
    /// `1/2 int_0^T int_{|x|>S+sigma} |(-Delta)^{(s+1)/2}(u psi)|^2`.
    pub half_dissipation: f64,
    /// `int_{|x|>S} G_0(u(0))`.
    pub initial_entropy: f64,
    pub initial_entropy_excess: f64,
    /// `A_T(S) = int_0^T int_{|x|>S} u^2`.
    pub annular_l2: f64,
    /// `A_T(S)` raised to the exponent.
    pub annular_l2_power: f64,
    /// Left-hand side over the right-hand side with unit constant.
    pub ratio: f64,
    /// Nodes where a negative undershoot was clamped to zero before `G_0`.
    pub clamped_nodes: usize,
    pub annulus: &'static str,
}

const ANNULUS_NOTE: &str = "radial distance from the box center, clipped to the box";

/// Evaluates the local entropy terms on sampled states `snapshots` taken at
/// `times` (first sample at `t = 0`). Entropies use `G_0` of `max(u, 0)`.
pub fn local_entropy_report(
    times: &[f64],
    snapshots: &[SpectralField],
    cfg: &SolverConfig,
    inner_radius: f64,
    width: f64,
) -> Result<LocalEntropyReport> {
    let grids: Vec<GridField> = snapshots.iter().map(SpectralField::to_grid).collect();
    let basis = match snapshots.first() {
        Some(u) => Arc::clone(u.basis()),
        None => return Err(Error::InsufficientData("no snapshots".into())),
    };
    local_entropy_report_on_grid(times, &grids, &basis, cfg, inner_radius, width)
}

/// As [`local_entropy_report`] for nodal states; only the dissipation term
/// goes through coefficient space.
pub fn local_entropy_report_on_grid(
    times: &[f64],
    snapshots: &[GridField],
    basis: &Arc<EigenBasis>,
    cfg: &SolverConfig,
    inner_radius: f64,
    width: f64,
) -> Result<LocalEntropyReport> {
    if times.len() != snapshots.len() || times.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least two snapshots with matching times (got {} times, {} snapshots)",
            times.len(),
            snapshots.len()
        )));
    }
    let geometry = Arc::new(cfg.geometry.clone());
    let psi = build_cutoff(inner_radius, width, &geometry)?;
    let (n, s) = (cfg.mobility.n, cfg.mobility.s);
    let center = geometry.center();
    let outer = inner_radius + width;
    let in_annulus = |x: &[f64]| distance(x, &center) > inner_radius;
    let in_outer = |x: &[f64]| distance(x, &center) > outer;

    let mut clamped = 0;
    let mut entropy_on = |u: &GridField, mask: &dyn Fn(&[f64]) -> bool| -> (f64, f64) {
        clamped += u.values().iter().filter(|&&v| v < 0.0).count();
        let g = u.map(|z| entropy_g0(z.max(0.0), n));
        let g_zero = g0_at_zero(n);
        let total = g.integral_where(mask);
        let excess = g.map(|v| v - g_zero).integral_where(mask);
        (total, excess)
    };

    let (initial_entropy, initial_entropy_excess) = entropy_on(&snapshots[0], &in_annulus);
    let (final_entropy, final_entropy_excess) =
        entropy_on(&snapshots[snapshots.len() - 1], &in_outer);

    let mut dissipation_rate = Vec::with_capacity(times.len());
    let mut l2_rate = Vec::with_capacity(times.len());
    for grid in snapshots {
        dissipation_rate.push(localized_dissipation(grid, &psi, basis, s, &in_outer)?);
        l2_rate.push(grid.map(|v| v * v).integral_where(in_annulus));
    }
    let half_dissipation = 0.5 * trapezoid(times, &dissipation_rate);
    let annular_l2 = trapezoid(times, &l2_rate);
    let exponent = local_entropy_exponent(n, s, cfg.geometry.dimension());
    let annular_l2_power = annular_l2.powf(exponent);
    let scale = width.powf(-2.0 * (s + 1.0));
    let lhs = final_entropy + half_dissipation;
    let rhs = initial_entropy + scale * (annular_l2 + annular_l2_power);
    Ok(LocalEntropyReport {
        inner_radius,
        width,
        exponent,
        final_entropy,
        final_entropy_excess,
        half_dissipation,
        initial_entropy,
        initial_entropy_excess,
        annular_l2,
        annular_l2_power,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
        clamped_nodes: clamped,
        annulus: ANNULUS_NOTE,
    })
}

/// `int_{mask} |(-Delta)^{(s+1)/2}(u psi)|^2` with the product projected onto the
/// retained modes.
fn localized_dissipation(
    grid: &GridField,
    psi: &CutoffFunction,
    basis: &Arc<EigenBasis>,
    s: f64,
    mask: &dyn Fn(&[f64]) -> bool,
) -> Result<f64> {
    let product = grid.mul(&psi.values)?.to_coefficients(basis)?;
    let w = product.frac_laplacian(0.5 * (s + 1.0))?.to_grid();
    Ok(w.map(|v| v * v).integral_where(mask))
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}
