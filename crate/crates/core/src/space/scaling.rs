//! Power-law scaling functions controlling volume growth and time scales.
//!
//! A `ScalingFunction` stands for either the ball-volume profile `V` or the
//! time-scale profile `phi` of a space: a strictly increasing function on
//! `(0, inf)` that vanishes at `0+` and diverges at infinity.  Two shapes are
//! supported: a single power law, and a two-regime power law that switches
//! exponent at `r = 1` (the pre-carpet shape: one exponent below unit scale,
//! another above).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScalingFunction {
    /// `prefactor * r^exponent`.
    PurePower { exponent: f64, prefactor: f64 },
    /// `prefactor * r^inner` for `r <= 1`, `prefactor * r^outer` for `r > 1`.
    /// Continuity at `r = 1` holds because both branches equal `prefactor`.
    TwoRegime {
        inner_exponent: f64,
        outer_exponent: f64,
        prefactor: f64,
    },
}

impl ScalingFunction {
    pub fn pure(exponent: f64) -> Self {
        ScalingFunction::PurePower {
            exponent,
            prefactor: 1.0,
        }
    }

    pub fn pure_with_prefactor(exponent: f64, prefactor: f64) -> Self {
        ScalingFunction::PurePower {
            exponent,
            prefactor,
        }
    }

    pub fn two_regime(inner_exponent: f64, outer_exponent: f64) -> Self {
        ScalingFunction::TwoRegime {
            inner_exponent,
            outer_exponent,
            prefactor: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ScalingFunction::PurePower {
                exponent,
                prefactor,
            } => exponent > 0.0 && prefactor > 0.0,
            ScalingFunction::TwoRegime {
                inner_exponent,
                outer_exponent,
                prefactor,
            } => inner_exponent > 0.0 && outer_exponent > 0.0 && prefactor > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "scaling_function",
                "exponents and prefactor must be strictly positive",
            ))
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            ScalingFunction::PurePower {
                exponent,
                prefactor,
            } => prefactor * r.powf(exponent),
            ScalingFunction::TwoRegime {
                inner_exponent,
                outer_exponent,
                prefactor,
            } => {
                if r <= 1.0 {
                    prefactor * r.powf(inner_exponent)
                } else {
                    prefactor * r.powf(outer_exponent)
                }
            }
        }
    }

    /// Inverse function; well-defined since the function is strictly increasing.
    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            ScalingFunction::PurePower {
                exponent,
                prefactor,
            } => (y / prefactor).powf(1.0 / exponent),
            ScalingFunction::TwoRegime {
                inner_exponent,
                outer_exponent,
                prefactor,
            } => {
                let scaled = y / prefactor;
                if scaled <= 1.0 {
                    scaled.powf(1.0 / inner_exponent)
                } else {
                    scaled.powf(1.0 / outer_exponent)
                }
            }
        }
    }

    /// Smallest exponent of the envelope `C1 (R/r)^a1 <= f(R)/f(r)`.
    pub fn lower_exponent(&self) -> f64 {
        match *self {
            ScalingFunction::PurePower { exponent, .. } => exponent,
            ScalingFunction::TwoRegime {
                inner_exponent,
                outer_exponent,
                ..
            } => inner_exponent.min(outer_exponent),
        }
    }

    /// Largest exponent of the envelope `f(R)/f(r) <= C2 (R/r)^a2`.
    pub fn upper_exponent(&self) -> f64 {
        match *self {
            ScalingFunction::PurePower { exponent, .. } => exponent,
            ScalingFunction::TwoRegime {
                inner_exponent,
                outer_exponent,
                ..
            } => inner_exponent.max(outer_exponent),
        }
    }

    /// Exponent governing behavior near `r = 0`.
    pub fn inner_exponent(&self) -> f64 {
        match *self {
            ScalingFunction::PurePower { exponent, .. } => exponent,
            ScalingFunction::TwoRegime { inner_exponent, .. } => inner_exponent,
        }
    }

    /// Exponent governing behavior as `r -> inf`.
    pub fn outer_exponent(&self) -> f64 {
        match *self {
            ScalingFunction::PurePower { exponent, .. } => exponent,
            ScalingFunction::TwoRegime { outer_exponent, .. } => outer_exponent,
        }
    }
}
