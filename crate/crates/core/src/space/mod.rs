//! Concrete spaces and their geometric data: which diffusion runs where,
//! with what metric factor and what volume measure.

mod distance;
mod gasket;
mod profile;
mod scaling;

pub use distance::riemannian_distance_bound;
pub use gasket::{GasketGraph, GasketVertex};
pub use profile::{smoothstep, RadialMetricProfile, CONNECTOR_WIDTH, PLATEAU_HIGH, PLATEAU_LOW};
pub use scaling::ScalingFunction;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which space and diffusion a run uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpaceDescriptor {
    /// Standard Brownian motion on R^d (generator Laplacian/2).
    EuclideanBm { dim: usize },
    /// Brownian motion for the conformal metric `G(|x|) I_d`, Euclidean
    /// distance, Riemannian volume.
    RadialMetricBm {
        dim: usize,
        profile: RadialMetricProfile,
    },
    /// Simple random walk on the one-sided pre-Sierpinski gasket; `levels`
    /// is a size hint for visit bookkeeping, not a wall.
    GasketWalk { levels: u32 },
}

impl SpaceDescriptor {
    pub fn euclidean(dim: usize) -> Self {
        SpaceDescriptor::EuclideanBm { dim }
    }

    pub fn radial(dim: usize, profile: RadialMetricProfile) -> Self {
        SpaceDescriptor::RadialMetricBm { dim, profile }
    }

    pub fn gasket() -> Self {
        SpaceDescriptor::GasketWalk { levels: 20 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceDescriptor::EuclideanBm { dim } => {
                if *dim == 0 {
                    return Err(Error::invalid("dim", "must be at least 1"));
                }
            }
            SpaceDescriptor::RadialMetricBm { dim, .. } => {
                if *dim < 2 {
                    return Err(Error::DimensionTooLow { need: 2, got: *dim });
                }
            }
            SpaceDescriptor::GasketWalk { levels } => {
                if *levels == 0 {
                    return Err(Error::invalid("levels", "must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// Ambient coordinate dimension (the gasket embeds in the plane).
    pub fn dim(&self) -> usize {
        match self {
            SpaceDescriptor::EuclideanBm { dim } => *dim,
            SpaceDescriptor::RadialMetricBm { dim, .. } => *dim,
            SpaceDescriptor::GasketWalk { .. } => 2,
        }
    }

    pub fn is_gasket(&self) -> bool {
        matches!(self, SpaceDescriptor::GasketWalk { .. })
    }

    /// Density of the invariant volume measure against Lebesgue measure at
    /// the point `x`; 1 off the radial spaces.
    pub fn density_at(&self, x: &[f64]) -> f64 {
        match self {
            SpaceDescriptor::RadialMetricBm { dim, profile } => {
                let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                profile.measure_density(*dim, r)
            }
            _ => 1.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceDescriptor::EuclideanBm { dim } => format!("euclid-bm(d={dim})"),
            SpaceDescriptor::RadialMetricBm { dim, profile } => {
                if let Some(c) = profile.constant_value() {
                    format!("radial-bm(d={dim}, G={c})")
                } else {
                    format!(
                        "radial-bm(d={dim}, breaks={:?}{})",
                        profile.breakpoints(),
                        if profile.starts_high() { ", high" } else { "" }
                    )
                }
            }
            SpaceDescriptor::GasketWalk { levels } => format!("gasket-walk(levels={levels})"),
        }
    }
}

/// Constants of the two-sided sub-Gaussian heat kernel bounds, tied to a
/// volume/time-scale pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelParams {
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub volume: ScalingFunction,
    pub time_scale: ScalingFunction,
}

impl HeatKernelParams {
    pub fn new(
        c5: f64,
        c6: f64,
        c7: f64,
        c8: f64,
        volume: ScalingFunction,
        time_scale: ScalingFunction,
    ) -> Result<Self> {
        for (name, v) in [("c5", c5), ("c6", c6), ("c7", c7), ("c8", c8)] {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "must be strictly positive"));
            }
        }
        volume.validate()?;
        time_scale.validate()?;
        Ok(HeatKernelParams {
            c5,
            c6,
            c7,
            c8,
            volume,
            time_scale,
        })
    }
}

/// Exponent presets for the pre-Sierpinski gasket: mass exponent
/// alpha = log3/log2 (three half-scale copies) and walk exponent
/// beta = log5/log2 (time factor 5 per doubling, resistance factor 5/3).
pub mod gasket_exponents {
    pub fn alpha() -> f64 {
        3f64.ln() / 2f64.ln()
    }

    pub fn beta() -> f64 {
        5f64.ln() / 2f64.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_validation() {
        assert!(SpaceDescriptor::euclidean(1).validate().is_ok());
        assert!(SpaceDescriptor::euclidean(0).validate().is_err());
        assert!(
            SpaceDescriptor::radial(1, RadialMetricProfile::euclidean())
                .validate()
                .is_err()
        );
        assert!(
            SpaceDescriptor::radial(3, RadialMetricProfile::uniform_four())
                .validate()
                .is_ok()
        );
        assert!(SpaceDescriptor::gasket().validate().is_ok());
    }

    #[test]
    fn density_follows_profile() {
        let s = SpaceDescriptor::radial(3, RadialMetricProfile::uniform_four());
        assert!((s.density_at(&[0.3, 0.0, 0.0]) - 8.0).abs() < 1e-12);
        let e = SpaceDescriptor::euclidean(3);
        assert_eq!(e.density_at(&[5.0, 1.0, 0.0]), 1.0);
    }

    #[test]
    fn heat_kernel_params_require_positive_constants() {
        let v = ScalingFunction::pure(2.0);
        let p = ScalingFunction::pure(2.0);
        assert!(HeatKernelParams::new(1.0, 1.0, 1.0, 1.0, v, p).is_ok());
        assert!(HeatKernelParams::new(0.0, 1.0, 1.0, 1.0, v, p).is_err());
    }
}
