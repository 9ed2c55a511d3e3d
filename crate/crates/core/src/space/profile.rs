//! Radially symmetric conformal metric profiles.
//!
//! The profile is a radial factor `G` with plateaus alternating between 1
//! and 4, joined by width-1 `C^2` smoothstep connectors.  A breakpoint list
//! `R_1 < R_2 < ...` ends the annuli: the plateau before `R_j` stops at
//! `R_j - 1`, the connector occupies `[R_j - 1, R_j)`, and the next plateau
//! starts at `R_j`.  Past the last breakpoint the profile is constant, so a
//! finite list describes a space homogeneous at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PLATEAU_LOW: f64 = 1.0;
pub const PLATEAU_HIGH: f64 = 4.0;

/// Width of every connector between consecutive plateaus.
pub const CONNECTOR_WIDTH: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialMetricProfile {
    breakpoints: Vec<f64>,
    starts_high: bool,
}

/// C^2 smoothstep on [0, 1]: S(0)=0, S(1)=1, S'=S''=0 at both ends.
#[inline]
pub fn smoothstep(u: f64) -> f64 {
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

#[inline]
fn smoothstep_derivative(u: f64) -> f64 {
    30.0 * u * u * (1.0 - u) * (1.0 - u)
}

impl RadialMetricProfile {
    /// Identity metric everywhere (`G == 1`).
    pub fn euclidean() -> Self {
        RadialMetricProfile {
            breakpoints: Vec::new(),
            starts_high: false,
        }
    }

    /// Constant factor 4 everywhere (`G == 4`).
    pub fn uniform_four() -> Self {
        RadialMetricProfile {
            breakpoints: Vec::new(),
            starts_high: true,
        }
    }

    /// Profile starting at value 1 near the origin; each breakpoint toggles
    /// the plateau value.  An odd count leaves `G == 4` at infinity, an even
    /// count returns to `G == 1`.
    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        Self::new(breakpoints, false)
    }

    pub fn new(breakpoints: Vec<f64>, starts_high: bool) -> Result<Self> {
        let mut prev = 0.0;
        for (i, &r) in breakpoints.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::invalid("breakpoints", "must be finite"));
            }
            // Each annulus must have room for its width-1 connector.
            if r - prev < CONNECTOR_WIDTH {
                return Err(Error::invalid(
                    "breakpoints",
                    format!(
                        "breakpoint {i} at {r} leaves less than the connector width after {prev}"
                    ),
                ));
            }
            prev = r;
        }
        Ok(RadialMetricProfile {
            breakpoints,
            starts_high,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn starts_high(&self) -> bool {
        self.starts_high
    }

    /// Constant profiles report their single value.
    pub fn constant_value(&self) -> Option<f64> {
        if self.breakpoints.is_empty() {
            Some(if self.starts_high {
                PLATEAU_HIGH
            } else {
                PLATEAU_LOW
            })
        } else {
            None
        }
    }

    /// Radius beyond which the profile is constant.
    pub fn homogeneous_beyond(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Plateau value at infinity.
    pub fn value_at_infinity(&self) -> f64 {
        let toggles = self.breakpoints.len();
        let high = self.starts_high ^ (toggles % 2 == 1);
        if high {
            PLATEAU_HIGH
        } else {
            PLATEAU_LOW
        }
    }

    /// The metric factor `G(r)`; total on `r >= 0`, always in `[1, 4]`.
    pub fn metric_factor(&self, r: f64) -> f64 {
        self.factor_and_derivative(r).0
    }

    /// Radial derivative `G'(r)`; zero on plateaus.
    pub fn metric_derivative(&self, r: f64) -> f64 {
        self.factor_and_derivative(r).1
    }

    pub fn factor_and_derivative(&self, r: f64) -> (f64, f64) {
        let mut value = if self.starts_high {
            PLATEAU_HIGH
        } else {
            PLATEAU_LOW
        };
        for &bp in &self.breakpoints {
            let next = if value == PLATEAU_LOW {
                PLATEAU_HIGH
            } else {
                PLATEAU_LOW
            };
            if r < bp - CONNECTOR_WIDTH {
                return (value, 0.0);
            }
            if r < bp {
                let u = r - (bp - CONNECTOR_WIDTH);
                let delta = next - value;
                return (
                    value + delta * smoothstep(u),
                    delta * smoothstep_derivative(u),
                );
            }
            value = next;
        }
        (value, 0.0)
    }

    /// Density of the Riemannian volume against Lebesgue measure at
    /// distance `r` from the origin: `sqrt(det(G I_d)) = G^(d/2)`.
    pub fn measure_density(&self, dim: usize, r: f64) -> f64 {
        let g = self.metric_factor(r);
        if g == PLATEAU_LOW {
            1.0
        } else {
            g.powf(dim as f64 / 2.0)
        }
    }
}
