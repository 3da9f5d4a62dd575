use serde::Serialize;

use super::cutoff::distance;
use crate::error::{Error, Result};
use crate::mobility::{entropy_g0, g0_at_zero};
use crate::spectral::GridField;

/// Flatness exponent `2(s+1)/n` of the waiting-time condition.
pub fn flatness_exponent(n: f64, s: f64) -> f64 {
    2.0 * (s + 1.0) / n
}

/// Scaled mean of `|G_0(u0) - G_0(0)|` over shells `r0 - delta < |x| < r0`.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub r0: f64,
    pub n: f64,
    /// Exponent `gamma` in the scaling `delta^{-gamma(2-n)}`.
    pub exponent: f64,
    pub deltas: Vec<f64>,
    pub densities: Vec<f64>,
    /// Grid nodes inside each shell.
    pub nodes: Vec<usize>,
    pub sup_density: f64,
    /// `sup^{-n/(2-n)}`, the scale of the waiting-time lower bound.
    pub waiting_time_scale: f64,
}

/// Evaluates the density for `delta = r0 2^{-k}`, `k = 0, 1, ...`, stopping
/// after `levels` shells or at the first shell without grid nodes.
pub fn condition_g_density(
    u0: &GridField,
    n: f64,
    r0: f64,
    exponent: f64,
    levels: usize,
) -> Result<DensityReport> {
    if !(1.0..2.0).contains(&n) {
        return Err(Error::Domain(format!("density needs 1 <= n < 2 (got {n})")));
    }
    let g = u0.geometry();
    if !(r0 > 0.0 && r0 <= g.inscribed_radius()) {
        return Err(Error::Domain(format!(
            "r0 must lie in (0, {}] (got {r0})",
            g.inscribed_radius()
        )));
    }
    let center = g.center();
    let g_zero = g0_at_zero(n);
    let samples: Vec<(f64, f64)> = u0
        .values()
        .indexed_iter()
        .map(|((i, j, k), &v)| {
            let r = distance(&g.node_coordinates([i, j, k]), &center);
            (r, (entropy_g0(v.max(0.0), n) - g_zero).abs())
        })
        .collect();
    let mut report = DensityReport {
        r0,
        n,
        exponent,
        deltas: Vec::new(),
        densities: Vec::new(),
        nodes: Vec::new(),
        sup_density: 0.0,
        waiting_time_scale: f64::INFINITY,
    };
    for k in 0..levels {
        let delta = r0 * 0.5f64.powi(k as i32);
        let (count, sum) = samples
            .iter()
            .filter(|(r, _)| *r < r0 && *r > r0 - delta)
            .fold((0usize, 0.0), |(c, s), (_, v)| (c + 1, s + v));
        if count == 0 {
            break;
        }
        let density = delta.powf(-exponent * (2.0 - n)) * sum / count as f64;
        report.deltas.push(delta);
        report.densities.push(density);
        report.nodes.push(count);
    }
    if report.deltas.is_empty() {
        return Err(Error::InsufficientData("no grid nodes inside the outermost shell".into()));
    }
    report.sup_density = report.densities.iter().copied().fold(0.0, f64::max);
    if report.sup_density > 0.0 {
        report.waiting_time_scale = report.sup_density.powf(-n / (2.0 - n));
    }
    Ok(report)
}
