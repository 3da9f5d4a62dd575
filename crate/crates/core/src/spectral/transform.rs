//! Tensor-product cosine/sine transforms between midpoint nodes and
//! coefficients of the normalized Neumann eigenfunctions.
//!
//! Along an axis of length `L` with `M` midpoint nodes `x_j = (j + 1/2) L / M`
//! the basis is `phi_0 = 1/sqrt(L)`, `phi_k = sqrt(2/L) cos(k pi x / L)`.
//! Projection is a DCT-II, evaluation a DCT-III; derivatives of the basis are
//! sine series handled by DST-III (evaluation) and DST-II (projection onto
//! `phi_k'`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array3, Axis, Zip};
use rustdct::{DctPlanner, TransformType2And3};

use super::geometry::{DomainGeometry, MAX_DIM};

#[derive(Clone, Copy)]
enum Kind {
    Analysis,
    Synthesis,
    DerivativeSynthesis,
    DerivativeAnalysis,
}

#[derive(Clone)]
struct AxisTransform {
    modes: usize,
    points: usize,
    length: f64,
    plan: Arc<dyn TransformType2And3<f64>>,
}

impl AxisTransform {
    fn norm(&self, k: usize) -> f64 {
        if k == 0 {
            1.0 / self.length.sqrt()
        } else {
            (2.0 / self.length).sqrt()
        }
    }

    fn wavenumber(&self, k: usize) -> f64 {
        k as f64 * PI / self.length
    }

    fn weight(&self) -> f64 {
        self.length / self.points as f64
    }

    /// `input` has the source length, `out` the target length; `buf` has
    /// length `points`.
    fn run(&self, kind: Kind, input: &[f64], out: &mut [f64], buf: &mut [f64], scratch: &mut [f64]) {
        let (n, m) = (self.modes, self.points);
        match kind {
            Kind::Analysis => {
                buf.copy_from_slice(input);
                self.plan.process_dct2_with_scratch(buf, scratch);
                let w = self.weight();
                for k in 0..n {
                    out[k] = w * self.norm(k) * buf[k];
                }
            }
            Kind::Synthesis => {
                buf.fill(0.0);
                buf[0] = 2.0 * input[0] * self.norm(0);
                for k in 1..n {
                    buf[k] = input[k] * self.norm(k);
                }
                self.plan.process_dct3_with_scratch(buf, scratch);
                out.copy_from_slice(&buf[..m]);
            }
            Kind::DerivativeSynthesis => {
                buf.fill(0.0);
                for k in 1..n {
                    buf[k - 1] = -input[k] * self.norm(k) * self.wavenumber(k);
                }
                self.plan.process_dst3_with_scratch(buf, scratch);
                out.copy_from_slice(&buf[..m]);
            }
            Kind::DerivativeAnalysis => {
                buf.copy_from_slice(input);
                self.plan.process_dst2_with_scratch(buf, scratch);
                let w = self.weight();
                out[0] = 0.0;
                for k in 1..n {
                    out[k] = -w * self.norm(k) * self.wavenumber(k) * buf[k - 1];
                }
            }
        }
    }
}

/// Planned transforms for every axis of a geometry.
#[derive(Clone)]
pub(crate) struct Transforms {
    axes: Vec<AxisTransform>,
}

impl fmt::Debug for Transforms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transforms")
            .field("axes", &self.axes.len())
            .finish()
    }
}

impl Transforms {
    pub(crate) fn new(geometry: &DomainGeometry) -> Self {
        let mut planner = DctPlanner::new();
        let axes = (0..geometry.dimension())
            .map(|a| AxisTransform {
                modes: geometry.modes()[a],
                points: geometry.points()[a],
                length: geometry.edge_lengths()[a],
                plan: planner.plan_dct2(geometry.points()[a]),
            })
            .collect();
        Self { axes }
    }

    fn apply(&self, input: &Array3<f64>, axis: usize, kind: Kind) -> Array3<f64> {
        let at = &self.axes[axis];
        let out_len = match kind {
            Kind::Analysis | Kind::DerivativeAnalysis => at.modes,
            Kind::Synthesis | Kind::DerivativeSynthesis => at.points,
        };
        let mut shape = [0; MAX_DIM];
        shape.copy_from_slice(input.shape());
        shape[axis] = out_len;
        let mut output = Array3::<f64>::zeros(shape);
        let in_len = input.shape()[axis];
        let mut lane_in = vec![0.0; in_len];
        let mut lane_out = vec![0.0; out_len];
        let mut buf = vec![0.0; at.points];
        let mut scratch = vec![0.0; at.plan.get_scratch_len()];
        Zip::from(input.lanes(Axis(axis)))
            .and(output.lanes_mut(Axis(axis)))
            .for_each(|src, mut dst| {
                for (x, v) in lane_in.iter_mut().zip(src.iter()) {
                    *x = *v;
                }
                at.run(kind, &lane_in, &mut lane_out, &mut buf, &mut scratch);
                for (d, v) in dst.iter_mut().zip(lane_out.iter()) {
                    *d = *v;
                }
            });
        output
    }

    fn chain(&self, input: &Array3<f64>, kinds: impl Fn(usize) -> Kind) -> Array3<f64> {
        let mut current = self.apply(input, 0, kinds(0));
        for axis in 1..self.axes.len() {
            current = self.apply(&current, axis, kinds(axis));
        }
        current
    }

    /// Nodal values -> coefficients `c_k = (u, phi_k)` by midpoint quadrature.
    pub(crate) fn analysis(&self, grid: &Array3<f64>) -> Array3<f64> {
        self.chain(grid, |_| Kind::Analysis)
    }

    /// Coefficients -> nodal values.
    pub(crate) fn synthesis(&self, coefficients: &Array3<f64>) -> Array3<f64> {
        self.chain(coefficients, |_| Kind::Synthesis)
    }

    /// Coefficients -> nodal values of the partial derivative along `axis`.
    pub(crate) fn derivative_synthesis(&self, coefficients: &Array3<f64>, axis: usize) -> Array3<f64> {
        self.chain(coefficients, |a| {
            if a == axis {
                Kind::DerivativeSynthesis
            } else {
                Kind::Synthesis
            }
        })
    }

    /// Nodal values `w` -> `(w, d phi_k / d x_axis)` by midpoint quadrature.
    pub(crate) fn derivative_analysis(&self, grid: &Array3<f64>, axis: usize) -> Array3<f64> {
        self.chain(grid, |a| {
            if a == axis {
                Kind::DerivativeAnalysis
            } else {
                Kind::Analysis
            }
        })
    }
}
