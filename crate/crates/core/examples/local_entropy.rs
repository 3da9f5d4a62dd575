//! Cutoffs, the local entropy terms, the tail estimate and the commutator
//! remainder on a short reference run.
//!
//!     cargo run --release --example local_entropy

use std::f64::consts::PI;
use std::sync::Arc;

use fracthin::diagnostics::{
    build_cutoff, leibniz_remainder, local_entropy_exponent, local_entropy_report,
    tail_constant_sweep,
};
use fracthin::experiment::{initial_data, presets};
use fracthin::solver::run;
use fracthin::spectral::build_basis;

fn main() -> fracthin::Result<()> {
    let mut cfg = presets::reference(64, 1e-8);
    cfg.solver.final_time = 0.05;
    let mut solver = cfg.solver_config()?;
    solver.keep_snapshots = true;
    let (_, u0, _) = initial_data(&cfg)?;
    let rec = run(&u0, &solver)?;
    let p = solver.mobility;
    println!("local entropy exponent {:.4}", local_entropy_exponent(p.n, p.s, 1));

    let geometry = Arc::new(solver.geometry.clone());
    let basis = build_basis(solver.geometry.clone());
    for width in [0.8, 0.4, 0.2, 0.1] {
        let r = local_entropy_report(&rec.times, &rec.snapshots, &solver, 1.0, width)?;
        println!(
            "S = 1, sigma = {width}: entropy excess {:.3e}, dissipation {:.3e}, ratio {:.3e}",
            r.final_entropy_excess, r.half_dissipation, r.ratio
        );
    }

    let cutoff = build_cutoff(1.0, 0.5, &geometry)?;
    println!("cutoff {:?}", cutoff.summary());
    for t in tail_constant_sweep(&cutoff, &basis, 0.5, 5)? {
        println!("tail: delta = {:.4}, constant = {:.4}", t.delta, t.constant);
    }

    let u = rec.final_state.clone();
    let psi = cutoff.values.to_coefficients(&basis)?;
    let l = leibniz_remainder(&u, &psi, 0.75)?;
    println!("commutator remainder ratio {:.4e} (L = {:.3})", l.ratio, 2.0 * PI);
    Ok(())
}
