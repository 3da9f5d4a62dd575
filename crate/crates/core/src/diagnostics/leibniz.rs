use crate::error::{Error, Result};
use crate::spectral::{GridField, SpectralField};

/// Remainder of the fractional product rule and its size relative to
/// `||u||_2 * max |(-Delta)^beta v|`.
#[derive(Clone, Debug)]
pub struct LeibnizRemainder {
    pub remainder: SpectralField,
    /// NaN when `(-Delta)^beta v` vanishes identically.
    pub ratio: f64,
}

/// `(-Delta)^beta(uv) - u (-Delta)^beta v - v (-Delta)^beta u`, with every
/// product formed on the quadrature grid and projected onto the retained modes.
pub fn leibniz_remainder(u: &SpectralField, v: &SpectralField, beta: f64) -> Result<LeibnizRemainder> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::Domain(format!("beta must lie in (0, 2) (got {beta})")));
    }
    let basis = u.basis();
    if basis.geometry() != v.basis().geometry() {
        return Err(Error::Config("fields live on different bases".into()));
    }
    let (ug, vg) = (u.to_grid(), v.to_grid());
    let lu = u.frac_laplacian(beta)?;
    let lv = v.frac_laplacian(beta)?;
    let lv_grid = lv.to_grid();
    let project = |g: GridField| g.to_coefficients(basis);
    let product = project(ug.mul(&vg)?)?.frac_laplacian(beta)?;
    let u_lv = project(ug.mul(&lv_grid)?)?;
    let v_lu = project(vg.mul(&lu.to_grid())?)?;
    let remainder = product.axpy(-1.0, &u_lv)?.axpy(-1.0, &v_lu)?;
    let denominator = u.l2_norm() * lv_grid.max_abs();
    let ratio = if denominator > 0.0 {
        remainder.l2_norm() / denominator
    } else {
        f64::NAN
    };
    Ok(LeibnizRemainder { remainder, ratio })
}
