use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Axis-aligned box `[0, L_1] x ... x [0, L_d]` together with the number of
/// retained cosine modes and midpoint quadrature nodes per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainGeometry {
    edge_lengths: Vec<f64>,
    modes: Vec<usize>,
    points: Vec<usize>,
}

/// Smallest quadrature size that holds products of three band-limited factors
/// without aliasing into the retained modes.
pub fn dealiased_points(modes: usize) -> usize {
    (3 * modes).div_ceil(2)
}

impl DomainGeometry {
    pub fn new(edge_lengths: Vec<f64>, modes: Vec<usize>, points: Vec<usize>) -> Result<Self> {
        let d = edge_lengths.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::Config(format!(
                "dimension must be 1, 2 or 3 (got {d})"
            )));
        }
        if modes.len() != d || points.len() != d {
            return Err(Error::Config(format!(
                "edge_lengths, modes and points must have equal length ({}, {}, {})",
                d,
                modes.len(),
                points.len()
            )));
        }
        for axis in 0..d {
            let (l, n, m) = (edge_lengths[axis], modes[axis], points[axis]);
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Config(format!(
                    "edge length on axis {axis} must be positive and finite (got {l})"
                )));
            }
            if n < 2 {
                return Err(Error::Config(format!(
                    "axis {axis} needs at least 2 modes (got {n})"
                )));
            }
            if m < dealiased_points(n) {
                return Err(Error::Config(format!(
                    "axis {axis}: {m} quadrature points cannot dealias {n} modes (need >= {})",
                    dealiased_points(n)
                )));
            }
        }
        Ok(Self {
            edge_lengths,
            modes,
            points,
        })
    }

    /// Box with the minimal dealiased quadrature on every axis.
    pub fn dealiased(edge_lengths: Vec<f64>, modes: Vec<usize>) -> Result<Self> {
        let points = modes.iter().map(|&n| dealiased_points(n)).collect();
        Self::new(edge_lengths, modes, points)
    }

    pub fn interval(length: f64, modes: usize) -> Result<Self> {
        Self::dealiased(vec![length], vec![modes])
    }

    pub fn dimension(&self) -> usize {
        self.edge_lengths.len()
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn volume(&self) -> f64 {
        self.edge_lengths.iter().product()
    }

    pub fn grid_spacing(&self, axis: usize) -> f64 {
        self.edge_lengths[axis] / self.points[axis] as f64
    }

    /// Largest grid spacing over all axes.
    pub fn max_grid_spacing(&self) -> f64 {
        (0..self.dimension())
            .map(|a| self.grid_spacing(a))
            .fold(0.0, f64::max)
    }

    /// Quadrature weight of a single node (identical for all nodes).
    pub fn node_weight(&self) -> f64 {
        (0..self.dimension()).map(|a| self.grid_spacing(a)).product()
    }

    /// Coordinate of midpoint node `j` on `axis`.
    pub fn node(&self, axis: usize, j: usize) -> f64 {
        (j as f64 + 0.5) * self.grid_spacing(axis)
    }

    pub fn center(&self) -> Vec<f64> {
        self.edge_lengths.iter().map(|l| 0.5 * l).collect()
    }

    /// Radius of the largest ball centred in the box.
    pub fn inscribed_radius(&self) -> f64 {
        self.edge_lengths
            .iter()
            .fold(f64::INFINITY, |acc, l| acc.min(0.5 * l))
    }

    pub fn coefficient_count(&self) -> usize {
        self.modes.iter().product()
    }

    pub fn node_count(&self) -> usize {
        self.points.iter().product()
    }

    /// Same box with a different number of modes per axis and the matching
    /// dealiased quadrature.
    pub fn with_modes(&self, modes: Vec<usize>) -> Result<Self> {
        Self::dealiased(self.edge_lengths.clone(), modes)
    }

    // Internal storage is always three dimensional; unused axes are
    // represented by a single mode on a single node of unit length.
    pub(crate) fn padded_modes(&self) -> [usize; MAX_DIM] {
        pad(&self.modes, 1)
    }

    pub(crate) fn padded_points(&self) -> [usize; MAX_DIM] {
        pad(&self.points, 1)
    }

    pub(crate) fn padded_lengths(&self) -> [f64; MAX_DIM] {
        let mut out = [1.0; MAX_DIM];
        out[..self.dimension()].copy_from_slice(&self.edge_lengths);
        out
    }

    /// Coordinates of the node with padded multi-index `idx` (length `d`).
    pub fn node_coordinates(&self, idx: [usize; MAX_DIM]) -> Vec<f64> {
        (0..self.dimension()).map(|a| self.node(a, idx[a])).collect()
    }
}

fn pad<T: Copy>(v: &[T], fill: T) -> [T; MAX_DIM] {
    let mut out = [fill; MAX_DIM];
    out[..v.len()].copy_from_slice(v);
    out
}
