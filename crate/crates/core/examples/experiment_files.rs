//! Writes a configuration, runs it through the file-based driver and reads
//! the artifacts back.
//!
//!     cargo run --release --example experiment_files -- [OUT]

use std::path::PathBuf;

use fracthin::experiment::{
    cmd_run, cmd_sweep, presets, read_snapshot, snapshot_path, ExperimentConfig, SweepSection,
};

fn main() -> fracthin::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("fracthin-example"), PathBuf::from);
    let mut cfg = presets::reference(64, 1e-6);
    cfg.solver.final_time = 0.05;
    cfg.solver.write_snapshots = true;
    let text = cfg.to_toml_string()?;
    std::fs::create_dir_all(&out).expect("output directory");
    std::fs::write(out.join("config.toml"), &text).expect("config file");
    let cfg = ExperimentConfig::load(&out.join("config.toml"))?;
    println!("config hash {}", cfg.hash());

    let run_dir = out.join("single");
    let o = cmd_run(&cfg, &run_dir)?;
    println!("wrote {} samples to {}", o.record.len(), run_dir.display());
    let snap = read_snapshot(&snapshot_path(&run_dir.join("snapshots"), 100))?;
    println!("snapshot 100: t = {}, {} coefficients", snap.t, snap.coefficients.len());

    let mut sweep = cfg.clone();
    sweep.solver.write_snapshots = false;
    sweep.sweep = Some(SweepSection {
        n: Some(vec![1.2, 1.5]),
        gamma: Some(vec![1e-6, 1e-4]),
        ..Default::default()
    });
    let r = cmd_sweep(&sweep, &out.join("sweep"), 1)?;
    for row in &r.rows {
        println!(
            "n = {}, gamma = {:e}: {} energy residual {:?}",
            row.point.n, row.point.gamma, row.status, row.energy_residual
        );
    }
    Ok(())
}
