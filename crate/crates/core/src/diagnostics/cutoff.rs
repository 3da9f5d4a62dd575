use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{DomainGeometry, GridField};

/// `sup_t |smoothstep'(t)|`, attained at `t = 1/2`.
pub const SMOOTHSTEP_SLOPE: f64 = 15.0 / 8.0;

/// Quintic smoothstep `6t^5 - 15t^4 + 10t^3`, clamped to `[0, 1]` outside.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// Derivative `30 t^2 (1 - t)^2` on `(0, 1)`, zero outside.
pub fn smoothstep_slope(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

/// Radial cutoff vanishing on the ball of radius `S` around the box center and
/// equal to one outside radius `S + sigma`.
#[derive(Clone, Debug)]
pub struct CutoffFunction {
    pub inner_radius: f64,
    pub width: f64,
    /// Polynomial degree of the transition profile.
    pub order: u32,
    /// `sigma * sup |grad psi|`.
    pub gradient_constant: f64,
    pub values: GridField,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutoffSummary {
    pub inner_radius: f64,
    pub width: f64,
    pub order: u32,
    pub gradient_bound: f64,
}

impl CutoffFunction {
    /// Value at radius `r` from the center.
    pub fn profile(&self, r: f64) -> f64 {
        smoothstep((r - self.inner_radius) / self.width)
    }

    /// `d psi / dr` at radius `r`.
    pub fn radial_slope(&self, r: f64) -> f64 {
        smoothstep_slope((r - self.inner_radius) / self.width) / self.width
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let c = self.values.geometry().center();
        self.profile(distance(x, &c))
    }

    /// Recorded bound on `|grad psi|`.
    pub fn gradient_bound(&self) -> f64 {
        self.gradient_constant / self.width
    }

    /// Largest `|grad psi|` over the grid nodes.
    pub fn max_gradient_on_grid(&self) -> f64 {
        let g = self.values.geometry();
        let c = g.center();
        self.values
            .values()
            .indexed_iter()
            .map(|((i, j, k), _)| self.radial_slope(distance(&g.node_coordinates([i, j, k]), &c)))
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> CutoffSummary {
        CutoffSummary {
            inner_radius: self.inner_radius,
            width: self.width,
            order: self.order,
            gradient_bound: self.gradient_bound(),
        }
    }
}

pub(crate) fn distance(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Samples the cutoff `psi_{S, sigma}` on the grid of `geometry`.
///
/// Requires `0 < S < S + sigma < R`, `R` being the inscribed radius of the box.
pub fn build_cutoff(inner_radius: f64, width: f64, geometry: &Arc<DomainGeometry>) -> Result<CutoffFunction> {
    let r = geometry.inscribed_radius();
    if !(inner_radius > 0.0 && width > 0.0 && inner_radius + width < r) {
        return Err(Error::Config(format!(
            "cutoff needs 0 < S < S + sigma < {r} (got S = {inner_radius}, sigma = {width})"
        )));
    }
    let c = geometry.center();
    let values = GridField::from_fn(Arc::clone(geometry), |x| {
        smoothstep((distance(x, &c) - inner_radius) / width)
    })?;
    Ok(CutoffFunction {
        inner_radius,
        width,
        order: 5,
        gradient_constant: SMOOTHSTEP_SLOPE,
        values,
    })
}
