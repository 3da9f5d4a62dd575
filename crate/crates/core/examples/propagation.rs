//! Front exponent of a spreading bump against 1/(n d + 2(s+1)).
//!
//!     cargo run --release --example propagation -- [N ...]

use fracthin::experiment::{execute_run, presets};

fn main() -> fracthin::Result<()> {
    let ns: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("n")).collect();
    let ns = if ns.is_empty() { vec![1.2, 1.35, 1.5] } else { ns };
    println!("{:>6} {:>10} {:>10} {:>8} {:>10}", "n", "fitted", "predicted", "points", "d(T)");
    for n in ns {
        let o = execute_run(&presets::propagation(n))?;
        let r = &o.report;
        match r.fit {
            Some(f) => println!(
                "{n:>6} {:>10.4} {:>10.4} {:>8} {:>10.4}",
                f.exponent, r.predicted_exponent, f.points, r.final_support_radius
            ),
            None => println!("{n:>6} no fit: {:?}", r.warnings),
        }
    }
    Ok(())
}
