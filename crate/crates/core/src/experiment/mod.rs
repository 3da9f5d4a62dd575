//! Configured runs, sweeps, the verification suite and their on-disk
//! artifacts.

mod commands;
mod config;
mod initial;
mod output;
pub mod presets;
mod verify;

pub use commands::{
    cmd_density, cmd_run, cmd_sweep, execute_run, initial_data, predicted_exponent,
    DensityOutput, RunOutcome, RunReport, SweepReport, SweepRow, DEFAULT_DENSITY_LEVELS,
    SWEEP_CSV_COLUMNS,
};
pub use config::{
    DiagnosticsSection, ExperimentConfig, GeometrySection, LiftSection, MobilitySection,
    SolverSection, SweepPoint, SweepSection, DEFAULT_MAX_RUNS,
};
pub use initial::InitialConditionSpec;
pub use output::{
    decode_snapshot, encode_snapshot, format_float, metadata_line, read_snapshot, run_csv,
    snapshot_path, Snapshot, RUN_CSV_COLUMNS, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};
pub use verify::{cmd_verify, Check, Fault, VerifyLevel, VerifyReport};
