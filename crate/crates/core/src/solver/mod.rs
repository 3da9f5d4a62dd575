//! Time integration of the Galerkin system at fixed regularization.

mod config;
mod run;
mod stepper;
mod system;

pub use config::{SolverConfig, SolverState, StepperKind, SupportTracking, DEFAULT_SAMPLES};
pub use run::{run, run_from, verify_identities, IdentityReport, RunRecord};
pub use stepper::{Integrator, StepReport};
pub use system::rhs;
