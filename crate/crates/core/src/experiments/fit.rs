//! Weighted least-squares extrapolation of ensemble growth constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::ensemble::EnsembleResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// `mean/t = a + b t^(-1/2)`; `a` extrapolates the per-time constant
    /// (transient spaces, d >= 3).
    InverseSqrt,
    /// `mean log t / t = a + b / log t`; `a` extrapolates the
    /// logarithmically corrected constant (d = 2).
    InverseLog,
    /// `log mean = a log t + b`; `a` is the growth exponent.
    PowerLaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// Extrapolated limit (or the exponent for `PowerLaw`).
    pub a: f64,
    pub b: f64,
    /// Weighted root-mean-square residual.
    pub residual_norm: f64,
    /// Covariance of (a, b).
    pub cov: [[f64; 2]; 2],
}

impl FitResult {
    pub fn a_stderr(&self) -> f64 {
        self.cov[0][0].max(0.0).sqrt()
    }
}

/// Fit the chosen model through the ensemble means, weighting each point by
/// its inverse variance.  Needs at least four horizons.
pub fn fit_limit(result: &EnsembleResult, model: FitModel) -> Result<FitResult> {
    let times = result.times();
    if times.len() < 4 {
        return Err(Error::invalid("times", "fit needs at least 4 horizons"));
    }
    let mut ys = Vec::with_capacity(times.len());
    let mut gs = Vec::with_capacity(times.len());
    let mut sigmas = Vec::with_capacity(times.len());
    for ((&t, &mean), &se) in times.iter().zip(&result.means).zip(&result.stderrs) {
        match model {
            FitModel::InverseSqrt => {
                ys.push(mean / t);
                gs.push(1.0 / t.sqrt());
                sigmas.push(se / t);
            }
            FitModel::InverseLog => {
                let l = t.ln();
                ys.push(mean * l / t);
                gs.push(1.0 / l);
                sigmas.push(se * l / t);
            }
            FitModel::PowerLaw => {
                if mean <= 0.0 {
                    return Err(Error::invalid("means", "power law needs positive means"));
                }
                ys.push(mean.ln());
                gs.push(t.ln());
                sigmas.push(se / mean);
            }
        }
    }
    weighted_line(&gs, &ys, &sigmas, model)
}

/// WLS for `y = a + b g` (or `y = a g + b` for the power law, where the
/// slope is the quantity of interest and is reported as `a`).
fn weighted_line(gs: &[f64], ys: &[f64], sigmas: &[f64], model: FitModel) -> Result<FitResult> {
    let n = gs.len();
    let all_noiseless = sigmas.iter().all(|&s| s == 0.0);
    let weights: Vec<f64> = sigmas
        .iter()
        .map(|&s| if all_noiseless { 1.0 } else { 1.0 / (s * s) })
        .collect();
    if !all_noiseless && sigmas.iter().any(|&s| s == 0.0) {
        return Err(Error::invalid(
            "stderrs",
            "mixing exact and noisy points is not supported",
        ));
    }

    // Design (intercept, g); for PowerLaw the slope column comes first so
    // that `a` is always the reported quantity.
    let sw: f64 = weights.iter().sum();
    let swg: f64 = weights.iter().zip(gs).map(|(w, g)| w * g).sum();
    let swgg: f64 = weights.iter().zip(gs).map(|(w, g)| w * g * g).sum();
    let swy: f64 = weights.iter().zip(ys).map(|(w, y)| w * y).sum();
    let swgy: f64 = weights
        .iter()
        .zip(gs)
        .zip(ys)
        .map(|((w, g), y)| w * g * y)
        .sum();
    let det = sw * swgg - swg * swg;
    if det.abs() < 1e-12 * sw * swgg.max(1e-300) {
        return Err(Error::SingularFit);
    }
    // intercept and slope of y = c0 + c1 g
    let c0 = (swgg * swy - swg * swgy) / det;
    let c1 = (sw * swgy - swg * swy) / det;
    let var_c0 = swgg / det;
    let var_c1 = sw / det;
    let cov_c01 = -swg / det;

    let mut rss = 0.0;
    for ((&y, &g), &w) in ys.iter().zip(gs).zip(&weights) {
        let r = y - c0 - c1 * g;
        rss += w * r * r;
    }
    let residual_norm = (rss / n as f64).sqrt();

    let (a, b, cov) = match model {
        FitModel::PowerLaw => (
            c1,
            c0,
            [[var_c1, cov_c01], [cov_c01, var_c0]],
        ),
        _ => (
            c0,
            c1,
            [[var_c0, cov_c01], [cov_c01, var_c1]],
        ),
    };
    Ok(FitResult {
        model,
        a,
        b,
        residual_norm,
        cov,
    })
}

/// Fit directly from raw (t, y, sigma) triples already in model
/// coordinates; used by the calibration tests.
pub fn fit_points(
    times: &[f64],
    means: &[f64],
    stderrs: &[f64],
    model: FitModel,
) -> Result<FitResult> {
    use crate::experiments::ensemble::EnsembleSpec;
    use crate::space::SpaceDescriptor;
    let result = EnsembleResult {
        spec: EnsembleSpec {
            space: SpaceDescriptor::euclidean(1),
            eps: 1.0,
            times: times.to_vec(),
            n_paths: 2,
            dt: 1.0,
            h: 0.25,
            seed: 0,
        },
        means: means.to_vec(),
        stderrs: stderrs.to_vec(),
        bias: vec![],
        wall_seconds: 0.0,
    };
    fit_limit(&result, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn noiseless_inverse_sqrt_recovery() {
        // y(t) = 6.2832 + 3 t^(-1/2), handed over as means = y * t.
        let times = [10.0f64, 20.0, 40.0, 80.0, 160.0];
        let means: Vec<f64> = times
            .iter()
            .map(|&t| (6.2832 + 3.0 / t.sqrt()) * t)
            .collect();
        let zeros = vec![0.0; times.len()];
        let fit = fit_points(&times, &means, &zeros, FitModel::InverseSqrt).unwrap();
        assert_relative_eq!(fit.a, 6.2832, epsilon = 1e-6);
        assert_relative_eq!(fit.b, 3.0, epsilon = 1e-6);
        assert!(fit.residual_norm < 1e-9);
    }

    #[test]
    fn noiseless_inverse_log_recovery() {
        let times = [100.0f64, 1000.0, 10_000.0, 100_000.0];
        let a = std::f64::consts::TAU;
        let means: Vec<f64> = times
            .iter()
            .map(|&t| (a + 4.0 / t.ln()) * t / t.ln())
            .collect();
        let zeros = vec![0.0; times.len()];
        let fit = fit_points(&times, &means, &zeros, FitModel::InverseLog).unwrap();
        assert_relative_eq!(fit.a, a, epsilon = 1e-6);
        assert_relative_eq!(fit.b, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn noiseless_power_law_recovery() {
        let times = [16.0f64, 64.0, 256.0, 1024.0];
        let means: Vec<f64> = times.iter().map(|&t| 2.5 * t.powf(0.683)).collect();
        let zeros = vec![0.0; times.len()];
        let fit = fit_points(&times, &means, &zeros, FitModel::PowerLaw).unwrap();
        assert_relative_eq!(fit.a, 0.683, epsilon = 1e-9);
        assert_relative_eq!(fit.b, 2.5f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn calibration_three_sigma_coverage() {
        // With known Gaussian noise the fitted `a` lands within 3 reported
        // sigmas in at least 99% of trials.
        let times = [10.0f64, 20.0, 40.0, 80.0];
        let sigma = 0.05;
        let truth = 6.2832;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        let mut hits = 0;
        let trials = 1000;
        for _ in 0..trials {
            let means: Vec<f64> = times
                .iter()
                .map(|&t| {
                    let y = truth + 3.0 / t.sqrt()
                        + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                    y * t
                })
                .collect();
            let ses: Vec<f64> = times.iter().map(|&t| sigma * t).collect();
            let fit = fit_points(&times, &means, &ses, FitModel::InverseSqrt).unwrap();
            if (fit.a - truth).abs() <= 3.0 * fit.a_stderr() {
                hits += 1;
            }
        }
        assert!(hits >= 990, "coverage {hits}/{trials}");
    }

    #[test]
    fn too_few_points_and_singular_designs_fail() {
        let times = [10.0, 20.0, 40.0];
        let means = [1.0, 2.0, 3.0];
        let ses = [0.1, 0.1, 0.1];
        assert!(fit_points(&times, &means, &ses, FitModel::InverseSqrt).is_err());
    }
}
