//! Numeric forms of the interpolation inequality and the iteration lemmas.

mod gn;
mod stampacchia;

pub use gn::{gn_exponent, gn_ratio, GnRatio};
pub use stampacchia::{
    geometric_grid, inhomogeneous_factor, inhomogeneous_radius, stampacchia_classic,
    stampacchia_geometric, stampacchia_inhomogeneous, DecreasingSampler, HypothesisCheck,
    LemmaReport, Prediction, DEFAULT_SAMPLES, ZERO_TOLERANCE,
};
