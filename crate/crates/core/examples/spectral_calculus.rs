//! Cosine eigenbasis on a box: transforms, fractional powers, seminorms.
//!
//!     cargo run --example spectral_calculus

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fracthin::spectral::{build_basis, random_field, DomainGeometry, SpectralField};

fn main() -> fracthin::Result<()> {
    let g = DomainGeometry::new(vec![2.0, 1.0], vec![24, 12], vec![36, 18])?;
    println!("box {:?}, modes {:?}, nodes {:?}", g.edge_lengths(), g.modes(), g.points());
    let basis = build_basis(g.clone());

    // (-Delta)^s of an eigenfunction
    let k = [3, 2, 0];
    let lambda = (3.0 * PI / 2.0f64).powi(2) + (2.0 * PI).powi(2);
    let phi = SpectralField::mode(basis.clone(), k)?;
    for s in [0.25, 0.5, 0.75] {
        let got = phi.frac_laplacian(s)?.coefficient(k);
        println!("(-Delta)^{s} phi_{k:?}: {got:.12} vs lambda^s = {:.12}", lambda.powf(s));
    }

    // Parseval and seminorms of a random band-limited field
    let u = random_field(&basis, &mut ChaCha8Rng::seed_from_u64(1), 1.5);
    let grid = u.to_grid();
    let l2_grid = grid.map(|v| v * v).integral().sqrt();
    println!("||u||: grid {l2_grid:.14}, coefficients {:.14}", u.l2_norm());
    for r in [0.5, 1.0, 1.5] {
        println!("|u|_H^{r} = {:.6}", u.seminorm(r));
    }
    let grad: f64 = u.gradient().iter().map(|gi| gi.map(|v| v * v).integral()).sum();
    println!("int |grad u|^2 = {grad:.10}, |u|_H^1^2 = {:.10}", u.seminorm(1.0).powi(2));

    // round trip through the nodes
    let back = grid.to_coefficients(&basis)?;
    let err = back.axpy(-1.0, &u)?.l2_norm();
    println!("grid round trip error {err:.2e}");
    println!("mass {:.6}, point value u(0.3, 0.7) = {:.6}", u.mass(), u.evaluate(&[0.3, 0.7]));
    Ok(())
}
