use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, SweepPoint};
use super::output::{
    format_float, run_csv, table_csv, write_json, write_snapshots, write_text,
};
use crate::diagnostics::{
    condition_g_density, detect_waiting_time, fit_propagation_exponent_after, flatness_exponent,
    local_entropy_report, DensityReport, LocalEntropyReport, PropagationFit,
};
use crate::error::{Error, Result};
use crate::mobility::lift_initial_datum;
use crate::solver::{run, verify_identities, IdentityReport, RunRecord, SolverConfig, SupportTracking};
use crate::spectral::GridField;

/// `1 / (n d + 2 (s + 1))`.
pub fn predicted_exponent(n: f64, s: f64, dimension: usize) -> f64 {
    1.0 / (n * dimension as f64 + 2.0 * (s + 1.0))
}

/// Contents of `report.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config_hash: String,
    pub seed: u64,
    pub family: &'static str,
    pub dimension: usize,
    pub modes: Vec<usize>,
    pub n: f64,
    pub s: f64,
    pub samples: usize,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub lift: f64,
    pub support_threshold: f64,
    pub identities: IdentityReport,
    pub mass_drift: f64,
    pub max_energy_increase: f64,
    pub final_energy: f64,
    pub min_u: f64,
    pub initial_support_radius: f64,
    pub final_support_radius: f64,
    pub predicted_exponent: f64,
    pub fit_r0: f64,
    pub fit: Option<PropagationFit>,
    pub waiting_r0: f64,
    pub tol_r: f64,
    /// First sample with `d(t) > r0 + tol_r`; the final time when the front
    /// never moves.
    pub waiting_time: Option<f64>,
    pub local_entropy: Vec<LocalEntropyReport>,
    pub warnings: Vec<String>,
}

/// A finished run: record plus the report written to disk.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub report: RunReport,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    status: &'static str,
    kind: &'a str,
    message: String,
    config_hash: &'a str,
}

/// Initial datum before and after lifting, plus the lift level.
pub fn initial_data(cfg: &ExperimentConfig) -> Result<(GridField, GridField, f64)> {
    let solver = cfg.solver_config()?;
    let geometry = Arc::new(solver.geometry.clone());
    let p = solver.mobility;
    let raw = cfg.initial.build(&geometry, p.n, p.s)?;
    if cfg.initial.family() == "custom-file" {
        return Ok((raw.clone(), raw, 0.0));
    }
    let lift = cfg.lift_params(&p)?;
    let lifted = lift_initial_datum(&raw, &p, &lift)?;
    Ok((raw, lifted, lift.shift(&p)))
}

/// Runs the solver and the diagnostics without touching the filesystem.
pub fn execute_run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut solver: SolverConfig = cfg.solver_config()?;
    let (raw, lifted, baseline) = initial_data(cfg)?;
    let d = &cfg.diagnostics;
    let threshold = match d.threshold {
        Some(t) => t,
        None => d.threshold_relative.unwrap_or(1e-6) * raw.max_abs(),
    };
    let tracking = threshold > 0.0;
    if tracking {
        solver.support = Some(SupportTracking {
            threshold,
            baseline,
            metric: d.metric,
        });
    }
    let want_local = !d.cutoff_inner.is_empty();
    solver.keep_snapshots = cfg.solver.write_snapshots || want_local;
    let record = run(&lifted, &solver)?;
    let mut warnings = record.warnings.clone();
    if solver.linear_mode {
        warnings.push("linear mode: the entropy identity does not apply".into());
    }
    if !tracking {
        warnings.push("initial datum is zero; support tracking disabled".into());
    }

    let h = solver.geometry.max_grid_spacing();
    let p = solver.mobility;
    let last = record.len() - 1;
    let d0 = record.support_radius[0];
    let fit_r0 = d.fit_r0.unwrap_or(0.0);
    let waiting_r0 = d.r0.unwrap_or(d0);
    let tol_r = d.tol_r.unwrap_or(2.0 * h);
    let (mut fit, mut waiting_time) = (None, None);
    if tracking {
        let series = record.support_series()?;
        match fit_propagation_exponent_after(&series, fit_r0, h, d.fit_start.unwrap_or(0.0)) {
            Ok(f) => fit = Some(f),
            Err(e) => warnings.push(format!("propagation fit: {e}")),
        }
        match detect_waiting_time(&series, waiting_r0, tol_r) {
            Ok(t) => waiting_time = Some(t),
            Err(e) => warnings.push(format!("waiting time: {e}")),
        }
    }
    let mut local_entropy = Vec::new();
    for &inner in &d.cutoff_inner {
        for &width in &d.cutoff_width {
            match local_entropy_report(&record.times, &record.snapshots, &solver, inner, width) {
                Ok(r) => local_entropy.push(r),
                Err(e) => warnings.push(format!("local entropy at S = {inner}, sigma = {width}: {e}")),
            }
        }
    }
    let report = RunReport {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        family: cfg.initial.family(),
        dimension: solver.geometry.dimension(),
        modes: solver.geometry.modes().to_vec(),
        n: p.n,
        s: p.s,
        samples: record.len(),
        accepted_steps: record.accepted_steps,
        rejected_steps: record.rejected_steps,
        lift: baseline,
        support_threshold: threshold,
        identities: verify_identities(&record, &solver),
        mass_drift: record.mass_drift(),
        max_energy_increase: record.max_energy_increase(),
        final_energy: record.energy[last],
        min_u: record.min_u.iter().copied().fold(f64::INFINITY, f64::min),
        initial_support_radius: d0,
        final_support_radius: record.support_radius[last],
        predicted_exponent: predicted_exponent(p.n, p.s, solver.geometry.dimension()),
        fit_r0,
        fit,
        waiting_r0,
        tol_r,
        waiting_time,
        local_entropy,
        warnings,
    };
    Ok(RunOutcome { record, report })
}

fn write_error(out: &Path, err: &Error, config_hash: &str) {
    let rec = ErrorRecord {
        status: "error",
        kind: err.kind(),
        message: err.to_string(),
        config_hash,
    };
    // the original error is what the caller needs to see
    let _ = write_json(&out.join("error.json"), &rec);
}

/// Executes one run and writes `run.csv`, `report.json` and the snapshots
/// under `out`. On failure writes `error.json` and returns the error.
pub fn cmd_run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    let hash = cfg.hash();
    let result = execute_run(cfg).and_then(|outcome| {
        write_text(&out.join("run.csv"), &run_csv(&outcome.record, &hash, cfg.seed))?;
        if cfg.solver.write_snapshots {
            write_snapshots(out, &outcome.record, &hash)?;
        }
        write_json(&out.join("report.json"), &outcome.report)?;
        Ok(outcome)
    });
    if let Err(e) = &result {
        write_error(out, e, &hash);
    }
    result
}

/// One row of the sweep table.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    #[serde(flatten)]
    pub point: SweepPoint,
    pub status: &'static str,
    pub predicted_exponent: f64,
    pub fitted_exponent: Option<f64>,
    pub waiting_time: Option<f64>,
    pub energy_residual: Option<f64>,
    pub entropy_residual: Option<f64>,
    pub mass_drift: Option<f64>,
    pub error_kind: Option<&'static str>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub config_hash: String,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_COLUMNS: [&str; 14] = [
    "index",
    "n",
    "s",
    "modes",
    "epsilon",
    "delta",
    "gamma",
    "status",
    "predicted_exponent",
    "fitted_exponent",
    "waiting_time",
    "energy_residual",
    "entropy_residual",
    "mass_drift",
];

fn sweep_row(index: usize, point: SweepPoint, dim: usize, result: Result<RunOutcome>) -> SweepRow {
    let mut row = SweepRow {
        index,
        point,
        status: "ok",
        predicted_exponent: predicted_exponent(point.n, point.s, dim),
        fitted_exponent: None,
        waiting_time: None,
        energy_residual: None,
        entropy_residual: None,
        mass_drift: None,
        error_kind: None,
        error: None,
    };
    match result {
        Ok(o) => {
            row.fitted_exponent = o.report.fit.map(|f| f.exponent);
            row.waiting_time = o.report.waiting_time;
            row.energy_residual = Some(o.report.identities.energy_residual);
            row.entropy_residual = Some(o.report.identities.entropy_residual);
            row.mass_drift = Some(o.report.mass_drift);
        }
        Err(e) => {
            row.status = "error";
            row.error_kind = Some(e.kind());
            row.error = Some(e.to_string());
        }
    }
    row
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, format_float)
}

/// Runs every sweep point on a pool of `threads` workers, each in its own
/// `run_NNN` directory, then writes `sweep.csv` and `sweep.json`.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: &Path, threads: usize) -> Result<SweepReport> {
    let points = cfg.sweep_points()?;
    let dim = cfg.geometry.lengths.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let row_cfg = cfg.at_point(p);
                let result = cmd_run(&row_cfg, &out.join(format!("run_{i:03}")));
                sweep_row(i, *p, dim, result)
            })
            .collect()
    });
    let hash = cfg.hash();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                format_float(r.point.n),
                format_float(r.point.s),
                r.point.modes.to_string(),
                format_float(r.point.epsilon),
                format_float(r.point.delta),
                format_float(r.point.gamma),
                r.status.to_string(),
                format_float(r.predicted_exponent),
                opt(r.fitted_exponent),
                opt(r.waiting_time),
                opt(r.energy_residual),
                opt(r.entropy_residual),
                opt(r.mass_drift),
            ]
        })
        .collect();
    write_text(
        &out.join("sweep.csv"),
        &table_csv(&hash, cfg.seed, &SWEEP_CSV_COLUMNS, &table),
    )?;
    let report = SweepReport {
        config_hash: hash,
        seed: cfg.seed,
        rows,
    };
    write_json(&out.join("sweep.json"), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityOutput {
    pub config_hash: String,
    pub seed: u64,
    pub family: &'static str,
    /// Shells are centred at the box centre.
    pub centre: Vec<f64>,
    #[serde(flatten)]
    pub report: DensityReport,
}

/// Default number of dyadic shells.
pub const DEFAULT_DENSITY_LEVELS: usize = 12;

/// Evaluates the flatness density of the unlifted initial datum and writes
/// `density.json`.
pub fn cmd_density(cfg: &ExperimentConfig, out: &Path) -> Result<DensityOutput> {
    let hash = cfg.hash();
    let result = density(cfg).and_then(|d| {
        write_json(&out.join("density.json"), &d)?;
        Ok(d)
    });
    if let Err(e) = &result {
        write_error(out, e, &hash);
    }
    result
}

fn density(cfg: &ExperimentConfig) -> Result<DensityOutput> {
    cfg.validate()?;
    let (raw, _, _) = initial_data(cfg)?;
    let p = cfg.mobility_params()?;
    let d = &cfg.diagnostics;
    let r0 = d
        .r0
        .or_else(|| cfg.initial.support_radius())
        .ok_or_else(|| Error::Config("density needs diagnostics.r0 for this family".into()))?;
    let exponent = d.density_exponent.unwrap_or_else(|| flatness_exponent(p.n, p.s));
    let levels = d.density_levels.unwrap_or(DEFAULT_DENSITY_LEVELS);
    let report = condition_g_density(&raw, p.n, r0, exponent, levels)?;
    Ok(DensityOutput {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        family: cfg.initial.family(),
        centre: raw.geometry().center(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::initial::InitialConditionSpec;
    use crate::experiment::presets;

    fn small(initial: InitialConditionSpec) -> ExperimentConfig {
        let mut c = presets::reference(32, 1e-6);
        c.initial = initial;
        c.solver.final_time = 0.01;
        c.solver.write_snapshots = true;
        c
    }

    #[test]
    fn constant_data_give_constant_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(InitialConditionSpec::Constant { value: 0.5 });
        let o = cmd_run(&cfg, dir.path()).unwrap();
        assert!(o.report.mass_drift < 1e-15);
        let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().contains(&cfg.hash()));
        assert_eq!(lines.next().unwrap(), "t,mass,energy_hs,entropy,dissipation,support_radius,min_u,max_u");
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 201);
        for r in &rows {
            assert_eq!(r[1], rows[0][1]);
            assert!(r[2].abs() < 1e-25);
        }
        assert!(dir.path().join("snapshots/snap_0200.bin").exists());
        assert!(dir.path().join("snapshots/snap_0200.json").exists());
        assert!(dir.path().join("report.json").exists());
    }

    #[test]
    fn reruns_are_byte_identical() {
        let cfg = small(InitialConditionSpec::CompactBump {
            amplitude: 1.0,
            radius: 1.0,
            center: None,
        });
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        cmd_run(&cfg, a.path()).unwrap();
        cmd_run(&cfg, b.path()).unwrap();
        for f in ["run.csv", "report.json", "snapshots/snap_0100.bin"] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn custom_file_reloads_a_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(InitialConditionSpec::CompactBump {
            amplitude: 1.0,
            radius: 1.0,
            center: None,
        });
        let first = cmd_run(&cfg, dir.path()).unwrap();
        let mut again = cfg.clone();
        again.initial = InitialConditionSpec::CustomFile {
            path: dir.path().join("snapshots/snap_0200.bin"),
        };
        let (_, u0, lift) = initial_data(&again).unwrap();
        assert_eq!(lift, 0.0);
        let want = first.record.final_state.to_grid();
        for (a, b) in u0.values().iter().zip(want.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn failures_write_an_error_record() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(InitialConditionSpec::Constant { value: 0.5 });
        cfg.solver.max_steps = Some(1);
        cfg.solver.final_time = 1.0;
        let err = cmd_run(&cfg, dir.path()).unwrap_err();
        let rec: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("error.json")).unwrap()).unwrap();
        assert_eq!(rec["kind"], err.kind());
        assert_eq!(rec["status"], "error");
    }

    #[test]
    fn sweep_rows_follow_cartesian_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(InitialConditionSpec::CompactBump {
            amplitude: 1.0,
            radius: 1.0,
            center: None,
        });
        cfg.solver.write_snapshots = false;
        cfg.sweep = Some(super::super::config::SweepSection {
            n: Some(vec![1.2, 1.35, 1.5]),
            gamma: Some(vec![1e-6, 1e-5]),
            ..Default::default()
        });
        let rep = cmd_sweep(&cfg, dir.path(), 2).unwrap();
        assert_eq!(rep.rows.len(), 6);
        for (i, r) in rep.rows.iter().enumerate() {
            assert_eq!(r.index, i);
            assert_eq!(r.status, "ok");
            assert!((r.predicted_exponent - 1.0 / (r.point.n + 3.0)).abs() < 1e-15);
        }
        assert_eq!(rep.rows[1].point.gamma, 1e-5);
        assert_eq!(rep.rows[2].point.n, 1.35);
        let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(csv.lines().count(), 8);
        assert!(dir.path().join("run_005/run.csv").exists());
    }

    #[test]
    fn sweep_records_row_failures_and_continues() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(InitialConditionSpec::Constant { value: 0.5 });
        cfg.solver.write_snapshots = false;
        // s = 1.5 is outside the admissible range
        cfg.sweep = Some(super::super::config::SweepSection {
            s: Some(vec![0.5, 1.5]),
            ..Default::default()
        });
        let rep = cmd_sweep(&cfg, dir.path(), 1).unwrap();
        assert_eq!(rep.rows[0].status, "ok");
        assert_eq!(rep.rows[1].status, "error");
        assert!(dir.path().join("run_001/error.json").exists());
    }

    #[test]
    fn density_of_the_waiting_time_profile() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = presets::waiting_time(1.0);
        let d = cmd_density(&cfg, dir.path()).unwrap();
        assert_eq!(d.report.r0, 1.0);
        assert!(d.report.sup_density.is_finite() && d.report.sup_density > 0.0);
        assert!(dir.path().join("density.json").exists());
    }
}
