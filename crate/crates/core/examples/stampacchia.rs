//! Iteration lemmas as checks on sampled decreasing functions.
//!
//!     cargo run --example stampacchia

use fracthin::inequality::{
    inhomogeneous_radius, stampacchia_classic, stampacchia_geometric, stampacchia_inhomogeneous,
    DecreasingSampler, DEFAULT_SAMPLES,
};

fn main() -> fracthin::Result<()> {
    // vanishes at 1; satisfies the recurrence with alpha = 1, beta = 3/2
    let f = |x: f64| (1.0 - x).max(0.0).powi(2);
    let c = 4.0 / 27.0;
    let s = DecreasingSampler::on_grid(f, 0.0, 4.0, DEFAULT_SAMPLES)?;
    let r = stampacchia_classic(&s, 0.0, c, 1.0, 1.5);
    println!("classical: {}", serde_json::to_string_pretty(&r).unwrap());

    let g = |x: f64| if x >= 1.0 { 0.0 } else { (-x / (1.0 - x)).exp() };
    let s = DecreasingSampler::on_grid(g, 0.0, 3.0, DEFAULT_SAMPLES)?;
    let r = stampacchia_geometric(&s, 0.5, 2.0);
    println!("geometric: holds = {}, prediction = {:?}", r.hypotheses_hold(), r.prediction);

    let radius = inhomogeneous_radius(1.0, c, 1.0, 1.5);
    let s = DecreasingSampler::on_grid(f, 0.0, radius, 32)?;
    let r = stampacchia_inhomogeneous(&s, radius * 1.5, c, 1.0, 1.5, 1e-3);
    println!(
        "inhomogeneous at R = {:.3}: holds = {}, deficit = {:?}",
        radius * 1.5,
        r.hypotheses_hold(),
        r.deficit
    );
    Ok(())
}
