//! Power-law mobility, its regularizations and the associated entropies.
//!
//! The regularized mobility is
//! `f_{eps,delta}(z) = z^{n+alpha} / (z^alpha + eps z^n + delta z^{n+alpha})`
//! for `z > 0` (zero otherwise) and `f_{eps,delta,gamma} = f_{eps,delta} + gamma`.
//! It is evaluated through the reciprocal `z^-n + eps z^-alpha + delta`, which
//! stays finite for large `z` and degrades gracefully to zero for small `z`.
//! The entropy `G` of a mobility `f` is the convex function with `G'' = 1/f`
//! and `G(1) = G'(1) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GridField;

/// Parameters of `f_{eps,delta,gamma}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobilityParams {
    pub n: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub s: f64,
    pub dimension: usize,
}

/// Lower bound that `alpha` must exceed when `epsilon > 0`:
/// `max{2 + 2d / (2(s+1) - d), n}`; infinite when `2(s+1) <= d`.
pub fn alpha_threshold(n: f64, s: f64, dimension: usize) -> f64 {
    let d = dimension as f64;
    let denom = 2.0 * (s + 1.0) - d;
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        (2.0 + 2.0 * d / denom).max(n)
    }
}

/// Upper end of the admissible exponent range `(d + 2(1-s)) / (d - 2s)_+`,
/// infinite when `d <= 2s`.
pub fn existence_upper_bound(s: f64, dimension: usize) -> f64 {
    let d = dimension as f64;
    let denom = (d - 2.0 * s).max(0.0);
    if denom == 0.0 {
        f64::INFINITY
    } else {
        (d + 2.0 * (1.0 - s)) / denom
    }
}

impl MobilityParams {
    /// Regularized mobility with the default degeneracy exponent
    /// `alpha = threshold + 0.5`.
    pub fn new(n: f64, s: f64, dimension: usize, epsilon: f64, delta: f64, gamma: f64) -> Result<Self> {
        let alpha = alpha_threshold(n, s, dimension) + 0.5;
        let p = Self {
            n,
            epsilon,
            delta,
            gamma,
            alpha: if alpha.is_finite() { alpha } else { n.max(2.0) + 0.5 },
            s,
            dimension,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pure power law `f(z) = z_+^n`.
    pub fn power_law(n: f64, s: f64, dimension: usize) -> Result<Self> {
        Self::new(n, s, dimension, 0.0, 0.0, 0.0)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0 && self.n.is_finite()) {
            return Err(Error::Config(format!("mobility exponent n must be >= 1 (got {})", self.n)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Config(format!("fractional order s must lie in (0,1) (got {})", self.s)));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Config(format!("dimension must be 1, 2 or 3 (got {})", self.dimension)));
        }
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be a finite nonnegative number (got {v})")));
            }
        }
        if self.epsilon > 0.0 {
            let t = alpha_threshold(self.n, self.s, self.dimension);
            if !(self.alpha > t) {
                return Err(Error::Config(format!(
                    "alpha = {} must exceed max{{2 + 2d/(2(s+1)-d), n}} = {t}",
                    self.alpha
                )));
            }
        }
        Ok(())
    }

    /// Whether `n` lies in the exponent range of the existence theory.
    pub fn in_existence_range(&self) -> bool {
        self.n < existence_upper_bound(self.s, self.dimension)
    }

    pub fn is_regularized(&self) -> bool {
        self.epsilon > 0.0 || self.delta > 0.0
    }

    /// Same parameters without the `gamma` shift.
    pub fn without_gamma(&self) -> Self {
        Self { gamma: 0.0, ..*self }
    }

    /// `1 / f_{eps,delta}(z)` for `z > 0`.
    #[inline]
    fn reciprocal(&self, z: f64) -> f64 {
        let lz = z.ln();
        let mut g = (-self.n * lz).exp() + self.delta;
        if self.epsilon > 0.0 {
            g += self.epsilon * (-self.alpha * lz).exp();
        }
        g
    }

    /// `f_{eps,delta}(z)` without the `gamma` shift; zero for `z <= 0`.
    #[inline]
    pub fn degenerate_part(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else if !self.is_regularized() {
            z.powf(self.n)
        } else {
            1.0 / self.reciprocal(z)
        }
    }

    /// `f_{eps,delta,gamma}(z)`; no validation, for inner loops.
    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        self.degenerate_part(z) + self.gamma
    }
}

/// `f_{eps,delta,gamma}(z)`: `gamma` for `z <= 0`, `z_+^n` when all
/// regularization parameters vanish.
pub fn mobility(z: f64, p: &MobilityParams) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::Domain("mobility evaluated at NaN".into()));
    }
    Ok(p.eval(z))
}

/// Closed-form derivative of the mobility; zero for `z <= 0`.
pub fn mobility_prime(z: f64, p: &MobilityParams) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if !p.is_regularized() {
        return p.n * z.powf(p.n - 1.0);
    }
    // f = 1/g, g = z^-n + eps z^-alpha + delta, f' = -g'/g^2
    let g = p.reciprocal(z);
    let mut minus_dg = p.n * z.powf(-p.n - 1.0);
    if p.epsilon > 0.0 {
        minus_dg += p.epsilon * p.alpha * z.powf(-p.alpha - 1.0);
    }
    minus_dg / (g * g)
}

/// Entropy `G_0` of the pure power law `z^n`, `n >= 1`.
///
/// Returns `+inf` for `z < 0` and for `z = 0` when `n >= 2`.
pub fn entropy_g0(z: f64, n: f64) -> f64 {
    if z.is_nan() || z < 0.0 {
        return f64::INFINITY;
    }
    if z == 0.0 {
        return g0_at_zero(n);
    }
    if n == 1.0 {
        z * z.ln() - z + 1.0
    } else if n < 2.0 {
        z.powf(2.0 - n) / ((n - 2.0) * (n - 1.0)) + z / (n - 1.0) + 1.0 / (2.0 - n)
    } else if n == 2.0 {
        -z.ln() + z - 1.0
    } else {
        z.powf(2.0 - n) / ((n - 2.0) * (n - 1.0)) + z / (n - 1.0) - 1.0 / (n - 2.0)
    }
}

/// `lim_{z -> 0+} G_0(z)`: `1` for `n = 1`, `1/(2-n)` for `1 < n < 2`, else `+inf`.
pub fn g0_at_zero(n: f64) -> f64 {
    if n == 1.0 {
        1.0
    } else if n < 2.0 {
        1.0 / (2.0 - n)
    } else {
        f64::INFINITY
    }
}

/// Entropy of `f_{eps,delta,gamma}`.
///
/// For `gamma = 0` the closed form `G_0 + eps-correction + delta-correction`
/// is used (`+inf` for `z <= 0`); for `gamma > 0` the normalized double
/// integral of `1/f` is evaluated by adaptive Simpson quadrature.
pub fn entropy_reg(z: f64, p: &MobilityParams) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::Domain("entropy evaluated at NaN".into()));
    }
    if p.gamma == 0.0 {
        Ok(entropy_closed_form(z, p))
    } else {
        entropy_by_quadrature(z, p, ENTROPY_QUADRATURE_TOL)
    }
}

/// Absolute tolerance of the adaptive quadrature used for `gamma > 0`.
pub const ENTROPY_QUADRATURE_TOL: f64 = 1e-10;

fn entropy_closed_form(z: f64, p: &MobilityParams) -> f64 {
    if z <= 0.0 {
        return f64::INFINITY;
    }
    let mut g = entropy_g0(z, p.n);
    if p.epsilon > 0.0 {
        let a = p.alpha;
        g += p.epsilon / (a - 1.0) * (z.powf(2.0 - a) / (a - 2.0) - 1.0 / (a - 2.0) + z - 1.0);
    }
    if p.delta > 0.0 {
        g += 0.5 * p.delta * (z * z - 1.0 - 2.0 * z + 2.0);
    }
    g
}

/// Below this point the `t = tau^2` substitution is applied when `eps > 0`.
const SUBSTITUTION_CUTOFF: f64 = 0.25;

/// `G(z) = int_1^z (z - t) / f(t) dt` with `f = f_{eps,delta,gamma}`, `gamma > 0`.
pub(crate) fn entropy_by_quadrature(z: f64, p: &MobilityParams, tol: f64) -> Result<f64> {
    let inv_f = |t: f64| 1.0 / p.eval(t);
    if z >= 0.0 {
        // G(z) = int_1^z (z - t) G''(t) dt; for z < 1 this is int_z^1 (t - z) G''.
        let integrand = |t: f64| (z - t).abs() * inv_f(t);
        let (a, b) = if z < 1.0 { (z, 1.0) } else { (1.0, z) };
        integrate_near_zero_aware(&integrand, a, b, p.epsilon > 0.0, tol)
    } else {
        // f = gamma below zero: quadratic continuation from G(0), G'(0).
        let g0 = entropy_by_quadrature(0.0, p, tol)?;
        let dg0 = -integrate_near_zero_aware(&inv_f, 0.0, 1.0, p.epsilon > 0.0, tol)?;
        Ok(g0 + dg0 * z + z * z / (2.0 * p.gamma))
    }
}

fn integrate_near_zero_aware(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    substitute: bool,
    tol: f64,
) -> Result<f64> {
    if !substitute || a >= SUBSTITUTION_CUTOFF {
        return adaptive_simpson(f, a, b, tol);
    }
    let mid = SUBSTITUTION_CUTOFF.min(b);
    // t = tau^2, dt = 2 tau dtau
    let g = |tau: f64| 2.0 * tau * f(tau * tau);
    let head = adaptive_simpson(&g, a.sqrt(), mid.sqrt(), 0.5 * tol)?;
    let tail = if b > mid {
        adaptive_simpson(f, mid, b, 0.5 * tol)?
    } else {
        0.0
    };
    Ok(head + tail)
}

const SIMPSON_MAX_DEPTH: u32 = 50;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("quadrature on [{a}, {b}] produced {v}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "adaptive Simpson did not converge on [{a}, {b}] (error estimate {})",
            delta.abs() / 15.0
        )));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Which entropy density an integral uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyKind {
    /// `G_0` of the pure power law.
    G0,
    /// `G_{eps,delta,gamma}` of the regularized mobility.
    Regularized,
}

/// Quadrature of the selected entropy over the grid.
///
/// Returns `+inf` (as a sentinel, not an error) when the density is infinite
/// at some node.
pub fn entropy_integral(u: &GridField, p: &MobilityParams, kind: EntropyKind) -> Result<f64> {
    let w = u.geometry().node_weight();
    let mut total = 0.0;
    match kind {
        EntropyKind::G0 => {
            for &z in u.values() {
                total += entropy_g0(z, p.n);
            }
        }
        EntropyKind::Regularized => {
            for &z in u.values() {
                total += entropy_reg(z, p)?;
            }
        }
    }
    Ok(total * w)
}

/// Exponents of the strictly positive lift of the initial datum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftParams {
    pub theta1: f64,
    pub theta2: f64,
}

impl LiftParams {
    /// `theta1 = min(1, 1/(alpha-2)) / 2`, `theta2 = 1`.
    pub fn default_for(p: &MobilityParams) -> Self {
        let cap = if p.alpha > 2.0 { 1.0 / (p.alpha - 2.0) } else { 1.0 };
        Self {
            theta1: 0.5 * cap.min(1.0),
            theta2: 1.0,
        }
    }

    pub fn validate(&self, p: &MobilityParams) -> Result<()> {
        let upper = if p.alpha > 2.0 { 1.0 / (p.alpha - 2.0) } else { f64::INFINITY };
        if !(self.theta1 > 0.0 && self.theta1 < upper) {
            return Err(Error::Config(format!(
                "theta1 = {} must lie in (0, 1/(alpha-2)) = (0, {upper})",
                self.theta1
            )));
        }
        if !(self.theta2 > 0.0 && self.theta2.is_finite()) {
            return Err(Error::Config(format!("theta2 must be positive (got {})", self.theta2)));
        }
        Ok(())
    }

    /// The constant `eps^theta1 + delta^theta2` added to the datum.
    pub fn shift(&self, p: &MobilityParams) -> f64 {
        let pow = |x: f64, e: f64| if x == 0.0 { 0.0 } else { x.powf(e) };
        pow(p.epsilon, self.theta1) + pow(p.delta, self.theta2)
    }
}

/// `u0 + eps^theta1 + delta^theta2` nodewise.
pub fn lift_initial_datum(u0: &GridField, p: &MobilityParams, l: &LiftParams) -> Result<GridField> {
    if u0.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "initial datum must be nonnegative (min = {})",
            u0.min()
        )));
    }
    let shift = l.shift(p);
    Ok(u0.map(|v| v + shift))
}
