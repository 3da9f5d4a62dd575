//! Interpolation inequalities on random band-limited fields.
//!
//!     cargo run --release --example interpolation -- [SAMPLES]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracthin::inequality::gn_ratio;
use fracthin::spectral::{build_basis, random_field, DomainGeometry};

fn main() -> fracthin::Result<()> {
    let samples: usize = std::env::args().nth(1).map_or(200, |a| a.parse().expect("SAMPLES"));
    let basis = build_basis(DomainGeometry::interval(2.0, 64)?);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_gn, mut worst_interp): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for _ in 0..samples {
        let decay = rng.gen_range(0.5..3.0);
        let u = random_field(&basis, &mut rng, decay);
        let b = rng.gen_range(0.2..1.9);
        worst_gn = worst_gn.max(gn_ratio(&u, b, 0.5)?.ratio);
        let (r0, r1) = (0.2, 1.5);
        let r = rng.gen_range(r0..r1);
        let theta = (r - r0) / (r1 - r0);
        let bound = u.seminorm(r0).powf(1.0 - theta) * u.seminorm(r1).powf(theta);
        worst_interp = worst_interp.max(u.seminorm(r) / bound - 1.0);
    }
    println!("{samples} fields: largest GN ratio {worst_gn:.4}");
    println!("largest relative seminorm interpolation excess {worst_interp:.3e}");
    Ok(())
}
