//! Waiting time of a flat profile and of a steeper one.
//!
//!     cargo run --release --example waiting_time -- [FACTOR ...]
//!
//! FACTOR scales the flatness exponent 2(s+1)/n of the initial profile.

use fracthin::experiment::{cmd_density, execute_run, presets};

fn main() -> fracthin::Result<()> {
    let factors: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("factor")).collect();
    let factors = if factors.is_empty() { vec![1.0, 0.75] } else { factors };
    let scratch = std::env::temp_dir().join("fracthin-waiting-time");
    for f in factors {
        let cfg = presets::waiting_time(f);
        let o = execute_run(&cfg)?;
        let r = &o.report;
        let density = cmd_density(&cfg, &scratch)?;
        println!(
            "factor {f}: d(0) = {:.4}, tol = {:.4}, T0 = {:?}, stride = {}, sup density = {:.3e}",
            r.initial_support_radius,
            r.tol_r,
            r.waiting_time,
            cfg.solver.snapshot_stride.unwrap_or(f64::NAN),
            density.report.sup_density
        );
    }
    Ok(())
}
