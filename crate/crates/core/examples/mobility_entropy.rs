//! Regularized mobility, the entropies and the positive lift of the datum.
//!
//!     cargo run --example mobility_entropy

use fracthin::mobility::{
    entropy_g0, entropy_reg, mobility, LiftParams, MobilityParams,
};

fn main() -> fracthin::Result<()> {
    let p = MobilityParams::new(1.5, 0.5, 1, 1e-4, 1e-4, 1e-6)?;
    println!("n = {}, alpha = {} (default), existence range: {}", p.n, p.alpha, p.in_existence_range());
    println!("{:>10} {:>14} {:>14} {:>14}", "z", "f(z)", "z^n", "G(z)");
    for z in [-0.1, 1e-6, 1e-3, 0.1, 1.0, 10.0] {
        println!(
            "{z:>10.1e} {:>14.6e} {:>14.6e} {:>14.6e}",
            mobility(z, &p)?,
            z.max(0.0).powf(p.n),
            entropy_reg(z, &p)?,
        );
    }
    println!("G0 for n in 1, 1.5, 2, 2.5 at z = 0.5:");
    for n in [1.0, 1.5, 2.0, 2.5] {
        println!("  n = {n}: {:.6}", entropy_g0(0.5, n));
    }
    let lift = LiftParams::default_for(&p);
    println!("lift {:?} adds {:.3e} to the datum", lift, lift.shift(&p));
    Ok(())
}
