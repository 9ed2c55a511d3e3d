//! The two-level fluctuation mechanism at desk scale: per-time sausage
//! constants of the homogeneous factor-1 and factor-4 radial spaces, and
//! the crossover of a single-shell profile from the first level toward the
//! second.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{capacity_ball, scaled_limit_ratio};
use crate::error::{Error, Result};
use crate::experiments::ensemble::{run_ensemble, EnsembleResult, EnsembleSpec};
use crate::experiments::fit::{fit_limit, FitModel, FitResult};
use crate::space::{RadialMetricProfile, SpaceDescriptor};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FluctuationConfig {
    pub dim: usize,
    /// Shell profile demonstrating the crossover.
    pub profile: RadialMetricProfile,
    pub eps: f64,
    pub times: Vec<f64>,
    pub n_paths: u64,
    pub dt: f64,
    pub h: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FluctuationReport {
    pub flat: EnsembleResult,
    pub four: EnsembleResult,
    pub shell: EnsembleResult,
    pub flat_fit: FitResult,
    pub four_fit: FitResult,
    /// Measured ratio of extrapolated per-time constants (factor-4 over
    /// factor-1) and its standard error.
    pub measured_ratio: f64,
    pub measured_ratio_stderr: f64,
    /// The dilation-constant prediction `2^((d-2)/2)`.
    pub claimed_ratio: f64,
    /// The capacity scale law `Cap(2 eps)/Cap(eps) = 2^(d-2)`.
    pub capacity_scale_ratio: f64,
    /// Per-horizon ratio of the shell-profile means to the flat means.
    pub crossover_ratio: Vec<f64>,
    pub crossover_stderr: Vec<f64>,
}

pub fn fluctuation_experiment(config: &FluctuationConfig) -> Result<FluctuationReport> {
    if config.dim < 3 {
        return Err(Error::DimensionTooLow {
            need: 3,
            got: config.dim,
        });
    }
    let base = |space: SpaceDescriptor, salt: u64| EnsembleSpec {
        space,
        eps: config.eps,
        times: config.times.clone(),
        n_paths: config.n_paths,
        dt: config.dt,
        h: config.h,
        seed: config.seed ^ salt,
    };
    let flat = run_ensemble(&base(
        SpaceDescriptor::radial(config.dim, RadialMetricProfile::euclidean()),
        0,
    ))?;
    let four = run_ensemble(&base(
        SpaceDescriptor::radial(config.dim, RadialMetricProfile::uniform_four()),
        1,
    ))?;
    let shell = run_ensemble(&base(
        SpaceDescriptor::radial(config.dim, config.profile.clone()),
        // Same streams as the flat run: the two ensembles agree exactly
        // until paths reach the shell, which makes the crossover ratio a
        // low-variance paired comparison.
        0,
    ))?;

    let flat_fit = fit_limit(&flat, FitModel::InverseSqrt)?;
    let four_fit = fit_limit(&four, FitModel::InverseSqrt)?;
    let measured_ratio = four_fit.a / flat_fit.a;
    let rel = (flat_fit.a_stderr() / flat_fit.a).hypot(four_fit.a_stderr() / four_fit.a);
    let measured_ratio_stderr = measured_ratio.abs() * rel;

    let mut crossover_ratio = Vec::with_capacity(config.times.len());
    let mut crossover_stderr = Vec::with_capacity(config.times.len());
    for j in 0..config.times.len() {
        let r = shell.means[j] / flat.means[j];
        let rel = (shell.stderrs[j] / shell.means[j]).hypot(flat.stderrs[j] / flat.means[j]);
        crossover_ratio.push(r);
        crossover_stderr.push(r * rel);
    }

    Ok(FluctuationReport {
        flat,
        four,
        shell,
        flat_fit,
        four_fit,
        measured_ratio,
        measured_ratio_stderr,
        claimed_ratio: scaled_limit_ratio(config.dim),
        capacity_scale_ratio: capacity_ball(config.dim, 2.0 * config.eps)?
            / capacity_ball(config.dim, config.eps)?,
        crossover_ratio,
        crossover_stderr,
    })
}
