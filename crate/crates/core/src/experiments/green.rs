//! Green-function comparison between a bounded radial modification and
//! free Brownian motion: the occupation density of a small probe ball far
//! from the modified region, against the closed form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{ball_volume, green_bm, green_bm_truncated};
use crate::diffusion::{RadialStepper, RngSpec, MAX_DIM};
use crate::error::{Error, Result};
use crate::space::RadialMetricProfile;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenComparisonConfig {
    pub dim: usize,
    /// Profile equal to 1 outside a bounded ball.
    pub profile: RadialMetricProfile,
    /// Start radii |y| to sweep, ascending.
    pub sweep: Vec<f64>,
    /// Probe annulus [eps1, eps2] around the start: the probe ball has
    /// center at separation (eps1+eps2)/2 outward and radius (eps2-eps1)/2.
    pub eps1: f64,
    pub eps2: f64,
    pub n_paths: u64,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GreenRow {
    pub start_radius: f64,
    /// Occupation-density estimate of the modified-space Green function at
    /// the probe separation, tail-corrected to infinite horizon.
    pub estimate: f64,
    pub stderr: f64,
    /// Closed-form free-space value at the same separation.
    pub reference: f64,
    pub difference: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenComparisonReport {
    pub rows: Vec<GreenRow>,
    pub probe_separation: f64,
    pub probe_radius: f64,
    /// Analytic tail added for the horizon truncation.
    pub tail_correction: f64,
}

pub fn green_comparison(config: &GreenComparisonConfig) -> Result<GreenComparisonReport> {
    if config.dim < 3 {
        return Err(Error::DimensionTooLow {
            need: 3,
            got: config.dim,
        });
    }
    if !(config.eps2 > config.eps1 && config.eps1 > 0.0) {
        return Err(Error::invalid("eps2", "need 0 < eps1 < eps2"));
    }
    if config.sweep.is_empty() || config.sweep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep", "need ascending start radii"));
    }
    if config.profile.value_at_infinity() != 1.0 {
        return Err(Error::invalid(
            "profile",
            "must agree with the flat metric outside a bounded set",
        ));
    }
    let sep = 0.5 * (config.eps1 + config.eps2);
    let probe_r = 0.5 * (config.eps2 - config.eps1);
    let modified_beyond = config.profile.homogeneous_beyond();
    let first = config.sweep[0];
    // The probe ball sits outward of the start, spanning radii
    // [|y| + eps1, |y| + eps2]; its inner edge must clear the modification
    // so the measure there is Lebesgue.
    if first + config.eps1 <= modified_beyond {
        return Err(Error::invalid(
            "sweep",
            "probe ball must clear the modified region",
        ));
    }

    let dim = config.dim;
    let reference = green_bm(dim, sep)?;
    let tail = reference - green_bm_truncated(dim, sep, config.horizon)?;
    let probe_volume = ball_volume(dim, probe_r);

    let mut rows = Vec::with_capacity(config.sweep.len());
    for (si, &radius) in config.sweep.iter().enumerate() {
        // Start on the first axis; probe center one separation further out,
        // clear of the modification.
        let mut start = [0.0f64; MAX_DIM];
        start[0] = radius;
        let mut probe = [0.0f64; MAX_DIM];
        probe[0] = radius + sep;

        let stepper = RadialStepper::new(dim, config.dt, config.profile.clone());
        let steps = (config.horizon / config.dt).ceil() as usize;
        let occ: Vec<f64> = (0..config.n_paths)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngSpec::new(config.seed ^ ((si as u64) << 32), i).stream();
                let mut x = [0.0f64; MAX_DIM];
                x[..dim].copy_from_slice(&start[..dim]);
                let r2 = probe_r * probe_r;
                let mut count = 0usize;
                for _ in 0..steps {
                    let d2: f64 = x[..dim]
                        .iter()
                        .zip(&probe[..dim])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2 < r2 {
                        count += 1;
                    }
                    stepper.step(&mut x[..dim], &mut rng);
                }
                count as f64 * config.dt
            })
            .collect();
        let n = occ.len() as f64;
        let mean = occ.iter().sum::<f64>() / n;
        let var = occ.iter().map(|o| (o - mean) * (o - mean)).sum::<f64>() / (n - 1.0);
        // The probe ball sits where the measure is Lebesgue, so dividing by
        // its volume gives the occupation density; the free-space tail
        // completes the horizon.
        let estimate = mean / probe_volume + tail;
        let stderr = (var / n).sqrt() / probe_volume;
        rows.push(GreenRow {
            start_radius: radius,
            estimate,
            stderr,
            reference,
            difference: estimate - reference,
        });
    }

    Ok(GreenComparisonReport {
        rows,
        probe_separation: sep,
        probe_radius: probe_r,
        tail_correction: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_profile_matches_closed_form() {
        // No modification: the occupation density reproduces the free
        // Green function within noise.
        let config = GreenComparisonConfig {
            dim: 3,
            profile: RadialMetricProfile::euclidean(),
            sweep: vec![5.0],
            eps1: 0.5,
            eps2: 1.5,
            n_paths: 4000,
            horizon: 40.0,
            dt: 2e-3,
            seed: 31,
        };
        let report = green_comparison(&config).unwrap();
        let row = &report.rows[0];
        assert!(
            row.difference.abs() < 3.0 * row.stderr + 0.02 * row.reference,
            "difference {} (se {}, ref {})",
            row.difference,
            row.stderr,
            row.reference
        );
    }

    #[test]
    fn validates_probe_and_profile() {
        let mut config = GreenComparisonConfig {
            dim: 3,
            profile: RadialMetricProfile::from_breakpoints(vec![2.0, 4.0]).unwrap(),
            sweep: vec![5.0, 10.0],
            eps1: 0.5,
            eps2: 1.5,
            n_paths: 4,
            horizon: 1.0,
            dt: 1e-2,
            seed: 0,
        };
        assert!(green_comparison(&config).is_ok());
        // Probe ball would dip into the modified region.
        config.sweep = vec![3.2, 10.0];
        assert!(green_comparison(&config).is_err());
        // Profiles that stay 4 at infinity are not bounded modifications
        // of the flat space.
        config.sweep = vec![8.0, 10.0];
        config.profile = RadialMetricProfile::from_breakpoints(vec![3.0]).unwrap();
        assert!(green_comparison(&config).is_err());
        config.profile = RadialMetricProfile::euclidean();
        config.dim = 2;
        assert!(green_comparison(&config).is_err());
    }
}
