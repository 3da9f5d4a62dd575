use std::sync::Arc;

use ndarray::{Array3, Zip};
use rand::Rng;

use super::basis::{EigenBasis, ModeIndex};
use super::geometry::{DomainGeometry, MAX_DIM};
use crate::error::{Error, Result};

/// Nodal values on the midpoint tensor grid of a geometry.
#[derive(Clone, Debug)]
pub struct GridField {
    geometry: Arc<DomainGeometry>,
    values: Array3<f64>,
}

impl GridField {
    pub fn new(geometry: Arc<DomainGeometry>, values: Array3<f64>) -> Result<Self> {
        let expected = geometry.padded_points();
        if values.shape() != expected {
            return Err(Error::Config(format!(
                "grid shape {:?} does not match geometry {:?}",
                values.shape(),
                expected
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid field has non-finite values".into()));
        }
        Ok(Self { geometry, values })
    }

    pub(crate) fn from_parts(geometry: Arc<DomainGeometry>, values: Array3<f64>) -> Self {
        debug_assert_eq!(values.shape(), geometry.padded_points());
        Self { geometry, values }
    }

    pub fn zeros(geometry: Arc<DomainGeometry>) -> Self {
        let s = geometry.padded_points();
        Self::from_parts(geometry, Array3::zeros(s))
    }

    /// Samples `f` at every node.
    pub fn from_fn(geometry: Arc<DomainGeometry>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let s = geometry.padded_points();
        let values = Array3::from_shape_fn((s[0], s[1], s[2]), |(i, j, k)| {
            f(&geometry.node_coordinates([i, j, k]))
        });
        Self::new(geometry, values)
    }

    pub fn geometry(&self) -> &DomainGeometry {
        &self.geometry
    }

    pub fn shared_geometry(&self) -> &Arc<DomainGeometry> {
        &self.geometry
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array3<f64> {
        self.values
    }

    /// Applies `f` nodewise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(Arc::clone(&self.geometry), self.values.mapv(f))
    }

    /// Nodewise product.
    pub fn mul(&self, other: &GridField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_parts(
            Arc::clone(&self.geometry),
            &self.values * &other.values,
        ))
    }

    fn check_same_grid(&self, other: &GridField) -> Result<()> {
        if Arc::ptr_eq(&self.geometry, &other.geometry) || *self.geometry == *other.geometry {
            Ok(())
        } else {
            Err(Error::Config("grid fields live on different geometries".into()))
        }
    }

    /// Midpoint-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.geometry.node_weight()
    }

    /// Midpoint-rule integral over the nodes selected by `mask(coordinates)`.
    pub fn integral_where(&self, mask: impl Fn(&[f64]) -> bool) -> f64 {
        let w = self.geometry.node_weight();
        self.values
            .indexed_iter()
            .filter(|((i, j, k), _)| mask(&self.geometry.node_coordinates([*i, *j, *k])))
            .map(|(_, v)| v * w)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.geometry.node_weight()).sqrt()
    }

    /// `(int |u|^b)^(1/b)` by midpoint quadrature; a quasi-norm for `b < 1`.
    pub fn lp_norm(&self, b: f64) -> f64 {
        (self.values.iter().map(|v| v.abs().powf(b)).sum::<f64>() * self.geometry.node_weight())
            .powf(1.0 / b)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Projects onto the retained modes of `basis`.
    pub fn to_coefficients(&self, basis: &Arc<EigenBasis>) -> Result<SpectralField> {
        to_coefficients(self, basis)
    }
}

/// A function represented by its coefficients `c_k = (u, phi_k)` on an
/// [`EigenBasis`].
#[derive(Clone, Debug)]
pub struct SpectralField {
    basis: Arc<EigenBasis>,
    coefficients: Array3<f64>,
}

impl SpectralField {
    pub fn new(basis: Arc<EigenBasis>, coefficients: Array3<f64>) -> Result<Self> {
        let expected = basis.coefficient_shape();
        if coefficients.shape() != expected {
            return Err(Error::Config(format!(
                "coefficient shape {:?} does not match basis {:?}",
                coefficients.shape(),
                expected
            )));
        }
        if coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spectral field has non-finite coefficients".into()));
        }
        Ok(Self {
            basis,
            coefficients,
        })
    }

    pub(crate) fn from_parts(basis: Arc<EigenBasis>, coefficients: Array3<f64>) -> Self {
        debug_assert_eq!(coefficients.shape(), basis.coefficient_shape());
        Self {
            basis,
            coefficients,
        }
    }

    /// Builds a field from a flat coefficient vector in row-major order.
    pub fn from_flat(basis: Arc<EigenBasis>, flat: Vec<f64>) -> Result<Self> {
        let s = basis.coefficient_shape();
        let coefficients = Array3::from_shape_vec((s[0], s[1], s[2]), flat)
            .map_err(|e| Error::Config(format!("coefficient vector: {e}")))?;
        Self::new(basis, coefficients)
    }

    pub fn zeros(basis: Arc<EigenBasis>) -> Self {
        let s = basis.coefficient_shape();
        Self::from_parts(basis, Array3::zeros(s))
    }

    /// The eigenfunction `phi_k` itself.
    pub fn mode(basis: Arc<EigenBasis>, k: ModeIndex) -> Result<Self> {
        if !basis.contains_mode(k) {
            return Err(Error::Config(format!("mode {k:?} is not in the basis")));
        }
        let mut f = Self::zeros(basis);
        f.coefficients[k] = 1.0;
        Ok(f)
    }

    /// The constant function `a`.
    pub fn constant(basis: Arc<EigenBasis>, a: f64) -> Self {
        let vol = basis.geometry().volume();
        let mut f = Self::zeros(basis);
        f.coefficients[[0, 0, 0]] = a * vol.sqrt();
        f
    }

    pub fn basis(&self) -> &Arc<EigenBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &Array3<f64> {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut Array3<f64> {
        &mut self.coefficients
    }

    pub fn coefficient(&self, k: ModeIndex) -> f64 {
        self.coefficients[k]
    }

    /// Coefficients in row-major order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.coefficients.iter().copied().collect()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_parts(Arc::clone(&self.basis), &self.coefficients * a)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<Self> {
        self.check_same_basis(other)?;
        let mut c = self.coefficients.clone();
        c.scaled_add(a, &other.coefficients);
        Ok(Self::from_parts(Arc::clone(&self.basis), c))
    }

    fn check_same_basis(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.geometry() == other.basis.geometry()
        {
            Ok(())
        } else {
            Err(Error::Config("spectral fields live on different bases".into()))
        }
    }

    /// `int u dx = c_0 sqrt(|Omega|)`.
    pub fn mass(&self) -> f64 {
        self.coefficients[[0, 0, 0]] * self.basis.geometry().volume().sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn to_grid(&self) -> GridField {
        to_grid(self)
    }

    pub fn frac_laplacian(&self, r: f64) -> Result<SpectralField> {
        frac_laplacian(self, r)
    }

    pub fn seminorm(&self, r: f64) -> f64 {
        seminorm(self, r)
    }

    pub fn gradient(&self) -> Vec<GridField> {
        gradient(self)
    }

    pub fn inner_product(&self, other: &SpectralField) -> Result<f64> {
        inner_product(self, other)
    }

    /// Evaluates the expansion at an arbitrary point of the box.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.coefficients
            .indexed_iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|((i, j, k), c)| c * self.basis.eigenfunction([i, j, k], x))
            .sum()
    }

    /// Evaluates the gradient of the expansion at an arbitrary point.
    pub fn evaluate_gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = self.basis.dimension();
        let lengths = self.basis.geometry().edge_lengths();
        let mut grad = vec![0.0; d];
        for ((i, j, k), &c) in self.coefficients.indexed_iter() {
            if c == 0.0 {
                continue;
            }
            let idx = [i, j, k];
            let mut values = [1.0; MAX_DIM];
            let mut slopes = [0.0; MAX_DIM];
            for a in 0..d {
                let w = idx[a] as f64 * std::f64::consts::PI / lengths[a];
                let norm = self.basis.normalization(a, idx[a]);
                values[a] = norm * (w * x[a]).cos();
                slopes[a] = -norm * w * (w * x[a]).sin();
            }
            for (a, g) in grad.iter_mut().enumerate() {
                let mut term = c * slopes[a];
                for b in (0..d).filter(|&b| b != a) {
                    term *= values[b];
                }
                *g += term;
            }
        }
        grad
    }
}

/// Orthonormal projection `c_k = (u, phi_k)` evaluated by midpoint quadrature.
pub fn to_coefficients(g: &GridField, basis: &Arc<EigenBasis>) -> Result<SpectralField> {
    if !(Arc::ptr_eq(g.shared_geometry(), basis.shared_geometry())
        || g.geometry() == basis.geometry())
    {
        return Err(Error::Config(
            "grid field and basis have different geometries".into(),
        ));
    }
    let c = basis.transforms().analysis(g.values());
    Ok(SpectralField::from_parts(Arc::clone(basis), c))
}

/// Evaluates the expansion at every quadrature node.
pub fn to_grid(u: &SpectralField) -> GridField {
    let values = u.basis.transforms().synthesis(&u.coefficients);
    GridField::from_parts(Arc::clone(u.basis.shared_geometry()), values)
}

/// Multiplies each coefficient by `lambda_k^r`, with `0^0 = 1` and `0^r = 0`
/// for `r > 0`.
pub fn frac_laplacian(u: &SpectralField, r: f64) -> Result<SpectralField> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "fractional power must be a finite nonnegative number (got {r})"
        )));
    }
    let mut c = u.coefficients.clone();
    Zip::from(&mut c)
        .and(u.basis.eigenvalues())
        .for_each(|c, &lam| *c *= multiplier(lam, r));
    Ok(SpectralField::from_parts(Arc::clone(&u.basis), c))
}

#[inline]
pub(crate) fn multiplier(lambda: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else if lambda == 0.0 {
        0.0
    } else {
        lambda.powf(r)
    }
}

/// Homogeneous seminorm `sqrt(sum_k lambda_k^r c_k^2)`.
pub fn seminorm(u: &SpectralField, r: f64) -> f64 {
    let mut acc = 0.0;
    Zip::from(&u.coefficients)
        .and(u.basis.eigenvalues())
        .for_each(|&c, &lam| acc += multiplier(lam, r) * c * c);
    acc.sqrt()
}

/// Partial derivatives on the quadrature grid, one field per axis.
pub fn gradient(u: &SpectralField) -> Vec<GridField> {
    (0..u.basis.dimension())
        .map(|axis| {
            let values = u
                .basis
                .transforms()
                .derivative_synthesis(&u.coefficients, axis);
            GridField::from_parts(Arc::clone(u.basis.shared_geometry()), values)
        })
        .collect()
}

/// Projects a vector field `w` onto the gradients of the basis:
/// returns the coefficient array of `k -> int w . grad phi_k dx`.
pub fn project_on_gradients(basis: &EigenBasis, w: &[Array3<f64>]) -> Array3<f64> {
    let mut acc = Array3::zeros(basis.coefficient_shape());
    for (axis, component) in w.iter().enumerate() {
        acc += &basis.transforms().derivative_analysis(component, axis);
    }
    acc
}

/// `L^2` inner product computed in coefficient space.
pub fn inner_product(u: &SpectralField, v: &SpectralField) -> Result<f64> {
    u.check_same_basis(v)?;
    Ok(Zip::from(&u.coefficients)
        .and(&v.coefficients)
        .fold(0.0, |acc, a, b| acc + a * b))
}

/// Random field with coefficients uniform in `[-1, 1]` damped by
/// `(1 + |k|)^-decay`.
pub fn random_field<R: Rng + ?Sized>(basis: &Arc<EigenBasis>, rng: &mut R, decay: f64) -> SpectralField {
    let s = basis.coefficient_shape();
    let c = Array3::from_shape_fn((s[0], s[1], s[2]), |(i, j, k)| {
        let norm = ((i * i + j * j + k * k) as f64).sqrt();
        rng.gen_range(-1.0..1.0) * (1.0 + norm).powf(-decay)
    });
    SpectralField::from_parts(Arc::clone(basis), c)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::build_basis;

    fn interval(l: f64, n: usize) -> Arc<EigenBasis> {
        build_basis(DomainGeometry::interval(l, n).unwrap())
    }

    fn square(n: usize) -> Arc<EigenBasis> {
        build_basis(DomainGeometry::dealiased(vec![PI, 2.0], vec![n, n + 1]).unwrap())
    }

    #[test]
    fn sampled_mode_projects_to_unit_vector() {
        for basis in [interval(1.3, 10), square(6)] {
            let g = basis.geometry().clone();
            for k in [[0, 0, 0], [3, 0, 0], [1, 2, 0]] {
                if !basis.contains_mode(k) || (g.dimension() == 1 && k[1] != 0) {
                    continue;
                }
                let grid = GridField::from_fn(Arc::clone(basis.shared_geometry()), |x| {
                    basis.eigenfunction(k, x)
                })
                .unwrap();
                let c = grid.to_coefficients(&basis).unwrap();
                for (idx, &v) in c.coefficients().indexed_iter() {
                    let expected = if [idx.0, idx.1, idx.2] == k { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-12, "k={k:?} idx={idx:?} v={v}");
                }
            }
        }
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let l = 2.3;
        let basis = interval(l, 8);
        let g = GridField::from_fn(Arc::clone(basis.shared_geometry()), |_| 1.7).unwrap();
        let c = g.to_coefficients(&basis).unwrap();
        assert!((c.coefficient([0, 0, 0]) - 1.7 * l.sqrt()).abs() < 1e-12);
        assert!(c.coefficients().iter().skip(1).all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn zero_field_and_single_mode_to_grid() {
        let basis = interval(PI, 8);
        assert!(SpectralField::zeros(Arc::clone(&basis))
            .to_grid()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let u = SpectralField::mode(Arc::clone(&basis), [3, 0, 0]).unwrap();
        let g = u.to_grid();
        for ((j, _, _), &v) in g.values().indexed_iter() {
            let x = basis.geometry().node(0, j);
            assert!((v - (2.0 / PI).sqrt() * (3.0 * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn round_trip_random_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for basis in [interval(0.8, 32), square(9)] {
            let u = random_field(&basis, &mut rng, 0.0);
            let back = u.to_grid().to_coefficients(&basis).unwrap();
            let err = back.axpy(-1.0, &u).unwrap().l2_norm();
            assert!(err < 1e-12 * u.l2_norm(), "err={err}");
        }
    }

    #[test]
    fn gradient_of_first_mode() {
        let basis = interval(PI, 8);
        let u = SpectralField::mode(Arc::clone(&basis), [1, 0, 0]).unwrap();
        let du = u.gradient();
        for ((j, _, _), &v) in du[0].values().indexed_iter() {
            let x = basis.geometry().node(0, j);
            assert!((v + (2.0 / PI).sqrt() * x.sin()).abs() < 1e-13);
        }
        let c = SpectralField::constant(Arc::clone(&basis), 3.0);
        assert!(c.gradient()[0].max_abs() < 1e-14);
    }

    #[test]
    fn negative_power_is_a_domain_error() {
        let basis = interval(1.0, 4);
        let u = SpectralField::zeros(basis);
        assert!(matches!(frac_laplacian(&u, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn mode_power_and_seminorm() {
        let basis = square(6);
        let u = SpectralField::mode(Arc::clone(&basis), [2, 3, 0]).unwrap();
        let lam = basis.eigenvalue([2, 3, 0]);
        let p = u.frac_laplacian(0.35).unwrap();
        assert!((p.coefficient([2, 3, 0]) - lam.powf(0.35)).abs() < 1e-12);
        assert!((u.seminorm(1.2) - lam.powf(0.6)).abs() < 1e-12);
        let c = SpectralField::constant(basis, 2.0);
        assert_eq!(c.seminorm(0.7), 0.0);
        assert!((c.seminorm(0.0) - c.l2_norm()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = interval(1.0, 4);
        let b = interval(1.0, 6);
        let g = GridField::zeros(Arc::clone(b.shared_geometry()));
        assert!(matches!(g.to_coefficients(&a), Err(Error::Config(_))));
        let u = SpectralField::zeros(a);
        let v = SpectralField::zeros(b);
        assert!(inner_product(&u, &v).is_err());
    }
}
