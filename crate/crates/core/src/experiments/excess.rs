//! Excess of the mean sausage volume over the linear capacity growth in
//! high dimension, and its stabilization check.
//!
//! The estimator carries a per-time instrument bias (grid quantization plus
//! the inter-sample excursion layer), so the raw excess against the exact
//! capacity drifts at a rate bounded by the printed bias bands.  The
//! stabilization property is therefore judged against the statistical
//! spread plus the growth of those bands, and no limit value is claimed.

use serde::{Deserialize, Serialize};

use crate::asymptotics::capacity_ball;
use crate::error::{Error, Result};
use crate::experiments::ensemble::{run_ensemble, EnsembleResult, EnsembleSpec};
use crate::space::{RadialMetricProfile, SpaceDescriptor};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExcessConfig {
    pub dim: usize,
    pub profile: RadialMetricProfile,
    pub eps: f64,
    pub times: Vec<f64>,
    pub n_paths: u64,
    pub dt: f64,
    pub h: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PairCheck {
    pub t_lo: f64,
    pub t_hi: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExcessReport {
    pub ensemble: EnsembleResult,
    pub capacity: f64,
    /// mean V(t) - t * capacity at each horizon.
    pub excess: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Pairwise stabilization checks over the last three horizons.
    pub checks: Vec<PairCheck>,
    pub stabilized: bool,
}

pub fn convergence_excess(config: &ExcessConfig) -> Result<ExcessReport> {
    if config.dim < 6 {
        return Err(Error::DimensionTooLow {
            need: 6,
            got: config.dim,
        });
    }
    if config.times.len() < 3 {
        return Err(Error::invalid("times", "need at least three horizons"));
    }
    let capacity = capacity_ball(config.dim, config.eps)?;
    let spec = EnsembleSpec {
        space: SpaceDescriptor::radial(config.dim, config.profile.clone()),
        eps: config.eps,
        times: config.times.clone(),
        n_paths: config.n_paths,
        dt: config.dt,
        h: config.h,
        seed: config.seed,
    };
    let ensemble = run_ensemble(&spec)?;
    let excess: Vec<f64> = ensemble
        .means
        .iter()
        .zip(ensemble.times())
        .map(|(m, t)| m - capacity * t)
        .collect();
    let stderr = ensemble.stderrs.clone();

    let k = excess.len();
    let last3 = k - 3;
    let mut checks = Vec::new();
    for i in last3..k {
        for j in (i + 1)..k {
            let gap = (excess[j] - excess[i]).abs();
            let stat = 3.0 * (stderr[i] * stderr[i] + stderr[j] * stderr[j]).sqrt();
            // The grid band averages out along a wandering boundary, so
            // only the documented sampling drift enters the tolerance.
            let band_growth =
                (ensemble.bias[j].step_band - ensemble.bias[i].step_band).abs();
            let tolerance = stat + band_growth;
            checks.push(PairCheck {
                t_lo: ensemble.times()[i],
                t_hi: ensemble.times()[j],
                gap,
                tolerance,
                within: gap <= tolerance,
            });
        }
    }
    let stabilized = checks.iter().all(|c| c.within);
    Ok(ExcessReport {
        ensemble,
        capacity,
        excess,
        stderr,
        checks,
        stabilized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_dimensions() {
        let config = ExcessConfig {
            dim: 5,
            profile: RadialMetricProfile::euclidean(),
            eps: 1.0,
            times: vec![1.0, 2.0, 4.0],
            n_paths: 4,
            dt: 1e-2,
            h: 0.25,
            seed: 0,
        };
        assert!(convergence_excess(&config).is_err());
    }

    #[test]
    fn excess_at_vanishing_horizon_is_the_single_ball() {
        // As t -> 0 the sausage degenerates to one ball (the surface term
        // scales like sqrt(t) and is negligible after one tiny step).
        let config = ExcessConfig {
            dim: 6,
            profile: RadialMetricProfile::euclidean(),
            eps: 1.0,
            times: vec![1e-4, 2e-4, 4e-4],
            n_paths: 8,
            dt: 1e-4,
            h: 0.25,
            seed: 5,
        };
        let report = convergence_excess(&config).unwrap();
        let ball = crate::asymptotics::ball_volume(6, 1.0);
        assert!(
            (report.excess[0] - ball).abs() < 0.1 * ball,
            "excess {} vs ball {ball}",
            report.excess[0]
        );
    }
}
