use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array3;

use super::geometry::{DomainGeometry, MAX_DIM};
use super::transform::Transforms;
use crate::error::{Error, Result};

/// Multi-index of a tensor eigenfunction, padded with zeros past the
/// dimension of the geometry.
pub type ModeIndex = [usize; MAX_DIM];

/// Neumann eigen-system of `-Laplace` on a box: `lambda_k = sum_i (k_i pi / L_i)^2`
/// with tensor products of normalized cosines as eigenfunctions.
#[derive(Debug)]
pub struct EigenBasis {
    geometry: Arc<DomainGeometry>,
    eigenvalues: Array3<f64>,
    transforms: Transforms,
}

impl EigenBasis {
    pub fn new(geometry: DomainGeometry) -> Arc<Self> {
        Self::from_shared(Arc::new(geometry))
    }

    pub fn from_shared(geometry: Arc<DomainGeometry>) -> Arc<Self> {
        let modes = geometry.padded_modes();
        let lengths = geometry.padded_lengths();
        let eigenvalues = Array3::from_shape_fn((modes[0], modes[1], modes[2]), |(i, j, k)| {
            [i, j, k]
                .iter()
                .zip(lengths.iter())
                .map(|(&ki, &l)| (ki as f64 * PI / l).powi(2))
                .sum()
        });
        let transforms = Transforms::new(&geometry);
        Arc::new(Self {
            geometry,
            eigenvalues,
            transforms,
        })
    }

    pub fn geometry(&self) -> &DomainGeometry {
        &self.geometry
    }

    pub fn shared_geometry(&self) -> &Arc<DomainGeometry> {
        &self.geometry
    }

    pub fn dimension(&self) -> usize {
        self.geometry.dimension()
    }

    /// Eigenvalue table indexed by the (padded) multi-index.
    pub fn eigenvalues(&self) -> &Array3<f64> {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: ModeIndex) -> f64 {
        self.eigenvalues[k]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Normalization constant of the one-dimensional factor `k` on `axis`.
    pub fn normalization(&self, axis: usize, k: usize) -> f64 {
        let l = self.geometry.edge_lengths()[axis];
        if k == 0 {
            1.0 / l.sqrt()
        } else {
            (2.0 / l).sqrt()
        }
    }

    /// Point evaluation of the eigenfunction with multi-index `k`.
    pub fn eigenfunction(&self, k: ModeIndex, x: &[f64]) -> f64 {
        (0..self.dimension())
            .map(|a| {
                let l = self.geometry.edge_lengths()[a];
                self.normalization(a, k[a]) * (k[a] as f64 * PI * x[a] / l).cos()
            })
            .product()
    }

    pub fn contains_mode(&self, k: ModeIndex) -> bool {
        let modes = self.geometry.padded_modes();
        k.iter().zip(modes.iter()).all(|(a, b)| a < b)
    }

    pub(crate) fn transforms(&self) -> &Transforms {
        &self.transforms
    }

    pub(crate) fn coefficient_shape(&self) -> [usize; MAX_DIM] {
        self.geometry.padded_modes()
    }

    /// Copy of this basis with one eigenvalue multiplied by `factor`.
    ///
    /// Exists for fault-injection runs of the verification suite.
    #[doc(hidden)]
    pub fn with_perturbed_eigenvalue(&self, k: ModeIndex, factor: f64) -> Result<Arc<Self>> {
        if !self.contains_mode(k) {
            return Err(Error::Config(format!("mode {k:?} is not in the basis")));
        }
        let mut eigenvalues = self.eigenvalues.clone();
        eigenvalues[k] *= factor;
        Ok(Arc::new(Self {
            geometry: Arc::clone(&self.geometry),
            eigenvalues,
            transforms: self.transforms.clone(),
        }))
    }
}

/// Builds the eigen-system for `geometry`.
pub fn build_basis(geometry: DomainGeometry) -> Arc<EigenBasis> {
    EigenBasis::new(geometry)
}
