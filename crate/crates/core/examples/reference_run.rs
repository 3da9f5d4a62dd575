//! The reference nonlinear run: compact bump on [0, 2 pi], n = 1.5, s = 1/2.
//!
//!     cargo run --release --example reference_run -- [MODES] [GAMMA]

use fracthin::experiment::{execute_run, presets};

fn main() -> fracthin::Result<()> {
    let mut args = std::env::args().skip(1);
    let modes: usize = args.next().map_or(128, |a| a.parse().expect("MODES"));
    let gamma: f64 = args.next().map_or(1e-8, |a| a.parse().expect("GAMMA"));
    let cfg = presets::reference(modes, gamma);
    let o = execute_run(&cfg)?;
    let (rec, rep) = (&o.record, &o.report);
    println!("N = {modes}, gamma = {gamma:e}: {} steps ({} rejected)", rep.accepted_steps, rep.rejected_steps);
    println!("mass drift            {:.3e}", rep.mass_drift);
    println!("max energy increase   {:.3e}", rep.max_energy_increase);
    println!("energy residual       {:.3e}", rep.identities.energy_residual);
    println!("entropy residual      {:.3e}", rep.identities.entropy_residual);
    println!("energy(T)             {:.12e}", rep.final_energy);
    println!("min u                 {:.3e}", rep.min_u);
    for i in (0..rec.len()).step_by(40) {
        println!(
            "t = {:.3}  E = {:.6e}  S = {:.6e}  d = {:.4}",
            rec.times[i], rec.energy[i], rec.entropy[i], rec.support_radius[i]
        );
    }
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
