//! Neumann eigenbasis on an interval or box and the spectral calculus built
//! on it: transforms, fractional powers, seminorms and gradients.

mod basis;
mod field;
mod geometry;
mod transform;

pub use basis::{build_basis, EigenBasis, ModeIndex};
pub use field::{
    frac_laplacian, gradient, inner_product, project_on_gradients, random_field, seminorm,
    to_coefficients, to_grid, GridField, SpectralField,
};
pub(crate) use field::multiplier;
pub use geometry::{dealiased_points, DomainGeometry, MAX_DIM};
