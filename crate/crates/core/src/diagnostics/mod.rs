//! Free-boundary observables computed from solver output.

mod cutoff;
mod density;
mod leibniz;
mod local;
mod support;
mod tail;

pub use cutoff::{build_cutoff, smoothstep, smoothstep_slope, CutoffFunction, CutoffSummary, SMOOTHSTEP_SLOPE};
pub use density::{condition_g_density, flatness_exponent, DensityReport};
pub use leibniz::{leibniz_remainder, LeibnizRemainder};
pub use local::{local_entropy_exponent, local_entropy_report, local_entropy_report_on_grid, LocalEntropyReport};
pub use support::{
    detect_waiting_time, fit_propagation_exponent, fit_propagation_exponent_after, support_radius,
    support_radius_above, threshold_sweep, PropagationFit, SupportMetric, SupportSeries,
    MIN_FIT_POINTS,
};
pub use tail::{tail_constant_sweep, tail_estimate_check, TailEstimate};
