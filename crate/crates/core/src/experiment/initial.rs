use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics::smoothstep;
use crate::error::{Error, Result};
use crate::spectral::{build_basis, DomainGeometry, GridField, SpectralField};

use super::output::read_snapshot;

/// Named initial-data family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConditionSpec {
    /// `A (1 - S5(|x - c| / r))` for `|x - c| < r`, zero outside, with the
    /// quintic smoothstep `S5`.
    CompactBump {
        amplitude: f64,
        radius: f64,
        /// Box center when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// `A ((r^2 - |x - c|^2)_+ / r^2)^p`, which behaves like
    /// `dist(x, edge)^p` near the support edge.
    WaitingTimeProfile {
        amplitude: f64,
        radius: f64,
        /// `2(s+1)/n` when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Constant {
        value: f64,
    },
    /// `mean + amplitude * phi_k`.
    SingleMode {
        mode: Vec<usize>,
        amplitude: f64,
        #[serde(default)]
        mean: f64,
    },
    /// Coefficients read from a snapshot file written by a previous run.
    CustomFile {
        path: PathBuf,
    },
}

impl InitialConditionSpec {
    pub fn family(&self) -> &'static str {
        match self {
            Self::CompactBump { .. } => "compact-bump",
            Self::WaitingTimeProfile { .. } => "waiting-time-profile",
            Self::Constant { .. } => "constant",
            Self::SingleMode { .. } => "single-mode",
            Self::CustomFile { .. } => "custom-file",
        }
    }

    /// Whether the datum is a compactly supported family the support
    /// diagnostics apply to.
    pub fn is_compact(&self) -> bool {
        matches!(self, Self::CompactBump { .. } | Self::WaitingTimeProfile { .. })
    }

    /// Radius of the support ball for compact families.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Self::CompactBump { radius, .. } | Self::WaitingTimeProfile { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn validate(&self, dimension: usize) -> Result<()> {
        let check_center = |c: &Option<Vec<f64>>| match c {
            Some(c) if c.len() != dimension => Err(Error::Config(format!(
                "center has {} coordinates, geometry has {dimension}",
                c.len()
            ))),
            _ => Ok(()),
        };
        match self {
            Self::CompactBump {
                amplitude,
                radius,
                center,
            } => {
                positive("amplitude", *amplitude)?;
                positive("radius", *radius)?;
                check_center(center)
            }
            Self::WaitingTimeProfile {
                amplitude,
                radius,
                exponent,
                center,
            } => {
                positive("amplitude", *amplitude)?;
                positive("radius", *radius)?;
                if let Some(p) = exponent {
                    positive("exponent", *p)?;
                }
                check_center(center)
            }
            Self::Constant { value } => {
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(Error::Config(format!("constant value must be >= 0 (got {value})")));
                }
                Ok(())
            }
            Self::SingleMode {
                mode,
                amplitude,
                mean,
            } => {
                if mode.len() != dimension {
                    return Err(Error::Config(format!(
                        "mode has {} indices, geometry has {dimension}",
                        mode.len()
                    )));
                }
                if !(amplitude.is_finite() && mean.is_finite()) {
                    return Err(Error::Config("single-mode values must be finite".into()));
                }
                Ok(())
            }
            Self::CustomFile { .. } => Ok(()),
        }
    }

    /// Profile exponent of the waiting-time family for the given `(n, s)`.
    pub fn profile_exponent(&self, n: f64, s: f64) -> Option<f64> {
        match self {
            Self::WaitingTimeProfile { exponent, .. } => {
                Some(exponent.unwrap_or(2.0 * (s + 1.0) / n))
            }
            _ => None,
        }
    }

    /// Nodal initial datum before lifting. `n` and `s` fix the default
    /// waiting-time exponent.
    pub fn build(&self, geometry: &Arc<DomainGeometry>, n: f64, s: f64) -> Result<GridField> {
        self.validate(geometry.dimension())?;
        let center_or = |c: &Option<Vec<f64>>| c.clone().unwrap_or_else(|| geometry.center());
        match self {
            Self::CompactBump {
                amplitude,
                radius,
                center,
            } => {
                let c = center_or(center);
                GridField::from_fn(Arc::clone(geometry), |x| {
                    let r = distance(x, &c) / radius;
                    amplitude * (1.0 - smoothstep(r.min(1.0)))
                })
            }
            Self::WaitingTimeProfile {
                amplitude,
                radius,
                center,
                ..
            } => {
                let c = center_or(center);
                let p = self.profile_exponent(n, s).expect("waiting-time family");
                let r2 = radius * radius;
                GridField::from_fn(Arc::clone(geometry), |x| {
                    let d = distance(x, &c);
                    let q = (r2 - d * d).max(0.0) / r2;
                    amplitude * q.powf(p)
                })
            }
            Self::Constant { value } => GridField::from_fn(Arc::clone(geometry), |_| *value),
            Self::SingleMode {
                mode,
                amplitude,
                mean,
            } => {
                let basis = build_basis((**geometry).clone());
                let mut k = [0usize; 3];
                k[..mode.len()].copy_from_slice(mode);
                let phi = SpectralField::mode(Arc::clone(&basis), k)?;
                let mut u = phi.scaled(*amplitude);
                u.coefficients_mut()[[0, 0, 0]] += mean * geometry.volume().sqrt();
                Ok(u.to_grid())
            }
            Self::CustomFile { path } => {
                let snap = read_snapshot(path)?;
                if &snap.geometry != geometry.as_ref() {
                    return Err(Error::Config(format!(
                        "{} was written on a different geometry",
                        path.display()
                    )));
                }
                let basis = build_basis(snap.geometry);
                Ok(SpectralField::from_flat(basis, snap.coefficients)?.to_grid())
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive (got {v})")))
    }
}

fn distance(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
