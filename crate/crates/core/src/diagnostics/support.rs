use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GridField;

/// How distance from the box center is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SupportMetric {
    /// Euclidean distance.
    #[default]
    Radial,
    /// Maximum coordinate distance.
    SupBox,
}

impl SupportMetric {
    pub fn distance(self, x: &[f64], center: &[f64]) -> f64 {
        match self {
            SupportMetric::Radial => x
                .iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            SupportMetric::SupBox => x
                .iter()
                .zip(center)
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        }
    }
}

/// Smallest `r` such that `|u| < threshold` at every node farther than `r`
/// from the box center. Zero when no node reaches the threshold.
pub fn support_radius(u: &GridField, threshold: f64, metric: SupportMetric) -> Result<f64> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::Domain(format!(
            "support threshold must be positive (got {threshold})"
        )));
    }
    let g = u.geometry();
    let center = g.center();
    let mut r: f64 = 0.0;
    for ((i, j, k), v) in u.values().indexed_iter() {
        if v.abs() >= threshold {
            r = r.max(metric.distance(&g.node_coordinates([i, j, k]), &center));
        }
    }
    Ok(r)
}

/// Support radius of `u - baseline`, i.e. measured above a uniform film.
pub fn support_radius_above(
    u: &GridField,
    baseline: f64,
    threshold: f64,
    metric: SupportMetric,
) -> Result<f64> {
    support_radius(&u.map(|v| v - baseline), threshold, metric)
}

/// Support radius of `u - baseline` for each threshold, to expose the
/// sensitivity of the measured front to the threshold choice.
pub fn threshold_sweep(
    u: &GridField,
    baseline: f64,
    thresholds: &[f64],
    metric: SupportMetric,
) -> Result<Vec<(f64, f64)>> {
    thresholds
        .iter()
        .map(|&t| Ok((t, support_radius_above(u, baseline, t, metric)?)))
        .collect()
}

/// Sampled support radii `d(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSeries {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    pub threshold: f64,
}

impl SupportSeries {
    pub fn new(times: Vec<f64>, radii: Vec<f64>, threshold: f64) -> Result<Self> {
        if times.len() != radii.len() {
            return Err(Error::Config(format!(
                "support series has {} times but {} radii",
                times.len(),
                radii.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("support series times must be increasing".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Config("support radii must be finite and nonnegative".into()));
        }
        Ok(Self {
            times,
            radii,
            threshold,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Least-squares power law `d(t) - r0 ~ C t^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationFit {
    pub exponent: f64,
    /// `ln C`.
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub points: usize,
    pub window_start: f64,
}

/// Minimum number of activated samples required for a fit.
pub const MIN_FIT_POINTS: usize = 10;

/// Fits the propagation exponent over the window that starts at the first
/// sample with `d(t) > r0 + 2 h` and runs to the end of the series.
pub fn fit_propagation_exponent(series: &SupportSeries, r0: f64, h: f64) -> Result<PropagationFit> {
    fit_propagation_exponent_after(series, r0, h, 0.0)
}

/// As [`fit_propagation_exponent`], additionally discarding samples with
/// `t < t_start` (to skip an initial transient).
pub fn fit_propagation_exponent_after(
    series: &SupportSeries,
    r0: f64,
    h: f64,
    t_start: f64,
) -> Result<PropagationFit> {
    let activation = r0 + 2.0 * h;
    let first = series
        .times
        .iter()
        .zip(&series.radii)
        .position(|(&t, &d)| d > activation && t > 0.0 && t >= t_start)
        .ok_or_else(|| Error::InsufficientData("support never exceeds r0 + 2h".into()))?;
    let pts: Vec<(f64, f64)> = series.times[first..]
        .iter()
        .zip(&series.radii[first..])
        .filter(|(_, &d)| d > r0)
        .map(|(&t, &d)| (t.ln(), (d - r0).ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} activated samples, need at least {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("fit window has a single time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PropagationFit {
        exponent: slope,
        intercept,
        residual,
        points: pts.len(),
        window_start: series.times[first],
    })
}

/// First sampled time with `d(t) > r0 + tol_r`; the final time when the
/// support never leaves the ball.
pub fn detect_waiting_time(series: &SupportSeries, r0: f64, tol_r: f64) -> Result<f64> {
    let limit = r0 + tol_r;
    let (&r_first, &t_last) = match (series.radii.first(), series.times.last()) {
        (Some(r), Some(t)) => (r, t),
        _ => return Err(Error::InsufficientData("empty support series".into())),
    };
    if r_first > limit {
        return Err(Error::InconsistentInitialSupport {
            radius: r_first,
            limit,
        });
    }
    Ok(series
        .times
        .iter()
        .zip(&series.radii)
        .find(|(_, &d)| d > limit)
        .map_or(t_last, |(&t, _)| t))
}
