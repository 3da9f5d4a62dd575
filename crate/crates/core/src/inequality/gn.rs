use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Interpolation exponent `(1/b - 1/2) / (1/b + (s+1)/d - 1/2)`.
pub fn gn_exponent(b: f64, s: f64, dimension: usize) -> f64 {
    let inv = 1.0 / b - 0.5;
    inv / (inv + (s + 1.0) / dimension as f64)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GnRatio {
    pub ratio: f64,
    pub theta: f64,
    pub l2: f64,
    pub top_seminorm: f64,
    pub lb: f64,
}

/// `||v||_2 / (||(-Delta)^{(s+1)/2} v||^theta ||v||_b^{1-theta} + ||v||_b)`,
/// with the `L^b` norm taken by grid quadrature.
pub fn gn_ratio(v: &SpectralField, b: f64, s: f64) -> Result<GnRatio> {
    if !(b > 0.0 && b < 2.0) {
        return Err(Error::Domain(format!("b must lie in (0, 2) (got {b})")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1) (got {s})")));
    }
    let theta = gn_exponent(b, s, v.basis().dimension());
    let l2 = v.l2_norm();
    let top_seminorm = v.seminorm(s + 1.0);
    let lb = v.to_grid().lp_norm(b);
    let denominator = top_seminorm.powf(theta) * lb.powf(1.0 - theta) + lb;
    if !(denominator > 0.0) {
        return Err(Error::DegenerateInput("denominator vanishes".into()));
    }
    Ok(GnRatio {
        ratio: l2 / denominator,
        theta,
        l2,
        top_seminorm,
        lb,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::{build_basis, random_field, DomainGeometry};

    #[test]
    fn exponent_examples() {
        assert!((gn_exponent(1.0, 0.5, 1) - 0.25).abs() < 1e-15);
        for d in 1..=3 {
            for b in [0.1, 0.5, 1.0, 1.5, 1.99] {
                let t = gn_exponent(b, 0.3, d);
                assert!((0.0..1.0).contains(&t), "{t}");
            }
        }
    }

    #[test]
    fn zero_field_is_degenerate() {
        let basis = build_basis(DomainGeometry::interval(1.0, 8).unwrap());
        let v = SpectralField::zeros(basis);
        assert!(matches!(gn_ratio(&v, 1.0, 0.5), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn ratio_bounded_on_random_fields() {
        let basis = build_basis(DomainGeometry::interval(2.0, 32).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let decay = rng.gen_range(0.5..2.5);
            let v = random_field(&basis, &mut rng, decay);
            let r = gn_ratio(&v, rng.gen_range(0.2..1.9), 0.5).unwrap();
            assert!(r.ratio.is_finite() && r.ratio > 0.0);
            worst = worst.max(r.ratio);
        }
        assert!(worst < 10.0, "{worst}");
    }
}
