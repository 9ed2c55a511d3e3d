//! Simulation laboratory for long-time Wiener-sausage volumes of diffusions
//! on metric measure spaces: exact Brownian sampling on R^d, Euler-Maruyama
//! diffusion on radial conformal metrics, simple random walk on the
//! pre-Sierpinski gasket, a deterministic occupancy-grid sausage estimator,
//! and ensemble experiments that extrapolate and cross-check the growth
//! constants against closed-form potential theory.

pub mod diffusion;
pub mod error;
pub mod experiments;
pub mod asymptotics;
pub mod measure;
pub mod space;

pub use error::{Error, Result};
