pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod inequality;
pub mod mobility;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
