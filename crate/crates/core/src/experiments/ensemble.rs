//! Parallel ensembles of sausage measurements over a grid of horizons.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{BmStepper, RadialStepper, RngSpec, MAX_DIM};
use crate::error::{Error, Result};
use crate::measure::{BiasBudget, SausageAccumulator};
use crate::space::{GasketGraph, GasketVertex, SpaceDescriptor};

/// Everything needed to reproduce one ensemble bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub space: SpaceDescriptor,
    pub eps: f64,
    /// Readout horizons, ascending.  Graph walks read them as step counts.
    pub times: Vec<f64>,
    pub n_paths: u64,
    pub dt: f64,
    pub h: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub spec: EnsembleSpec,
    pub means: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Systematic bands of the estimator at each horizon.
    pub bias: Vec<BiasBudget>,
    /// Seconds of wall clock, outside the reproducibility contract.
    pub wall_seconds: f64,
}

impl EnsembleResult {
    pub fn times(&self) -> &[f64] {
        &self.spec.times
    }
}

/// Simulate `n_paths` independent paths and measure the nested sausage
/// volume at every requested horizon in a single pass per path.  The
/// aggregation is a fixed-order reduction over path indices, so results do
/// not depend on the worker count.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    validate(spec)?;
    let start = std::time::Instant::now();
    let per_path: Vec<Vec<f64>> = match &spec.space {
        SpaceDescriptor::EuclideanBm { dim } => {
            let dim = *dim;
            let stepper = BmStepper::new(dim, spec.dt);
            run_continuum(spec, dim, move |x, rng| stepper.step(x, rng), |_| 1.0)?
        }
        SpaceDescriptor::RadialMetricBm { dim, profile } => {
            let dim = *dim;
            let stepper = RadialStepper::new(dim, spec.dt, profile.clone());
            let space = spec.space.clone();
            run_continuum(
                spec,
                dim,
                move |x, rng| stepper.step(x, rng),
                move |x| space.density_at(x),
            )?
        }
        SpaceDescriptor::GasketWalk { .. } => run_gasket(spec)?,
    };

    let k = spec.times.len();
    let n = spec.n_paths as f64;
    let mut means = vec![0.0; k];
    let mut stderrs = vec![0.0; k];
    for values in &per_path {
        for (m, v) in means.iter_mut().zip(values) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    for values in &per_path {
        for j in 0..k {
            let d = values[j] - means[j];
            stderrs[j] += d * d;
        }
    }
    for s in stderrs.iter_mut() {
        *s = (*s / (n - 1.0) / n).sqrt();
    }

    let bias = spec
        .times
        .iter()
        .zip(&means)
        .map(|(_, &mean)| {
            let dim = spec.space.dim();
            let gap = (dim as f64 * spec.dt).sqrt();
            BiasBudget::for_estimate(mean, dim, spec.eps, spec.h, gap)
        })
        .collect();

    Ok(EnsembleResult {
        spec: spec.clone(),
        means,
        stderrs,
        bias,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

fn validate(spec: &EnsembleSpec) -> Result<()> {
    spec.space.validate()?;
    if spec.n_paths < 2 {
        return Err(Error::invalid("n_paths", "need at least 2 paths"));
    }
    if spec.times.is_empty() {
        return Err(Error::invalid("times", "need at least one horizon"));
    }
    if spec.times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("times", "must be strictly ascending"));
    }
    if spec.times[0] <= 0.0 {
        return Err(Error::invalid("times", "horizons must be positive"));
    }
    if !spec.space.is_gasket() && !(spec.dt > 0.0) {
        return Err(Error::invalid("dt", "must be strictly positive"));
    }
    Ok(())
}

fn run_continuum<S, F>(
    spec: &EnsembleSpec,
    dim: usize,
    step: S,
    density: F,
) -> Result<Vec<Vec<f64>>>
where
    S: Fn(&mut [f64], &mut ChaCha8Rng) + Sync,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let checkpoints: Vec<usize> = spec
        .times
        .iter()
        .map(|t| (t / spec.dt).round().max(1.0) as usize)
        .collect();
    (0..spec.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngSpec::new(spec.seed, i).stream();
            let mut acc = SausageAccumulator::new(dim, spec.eps, spec.h)?;
            let mut x = [0.0f64; MAX_DIM];
            acc.observe(&x[..dim], &density)?;
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next = 0usize;
            let last = *checkpoints.last().unwrap();
            for s in 1..=last {
                step(&mut x[..dim], &mut rng);
                acc.observe(&x[..dim], &density)?;
                while next < checkpoints.len() && s == checkpoints[next] {
                    acc.flush(&density)?;
                    out.push(acc.weight());
                    next += 1;
                }
            }
            Ok(out)
        })
        .collect()
}

fn run_gasket(spec: &EnsembleSpec) -> Result<Vec<Vec<f64>>> {
    let graph = GasketGraph::new();
    let checkpoints: Vec<usize> = spec.times.iter().map(|t| t.round().max(1.0) as usize).collect();
    (0..spec.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngSpec::new(spec.seed, i).stream();
            let mut v = GasketVertex::ORIGIN;
            let mut visited = rustc_hash::FxHashSet::default();
            visited.insert(v);
            let mut scratch = Vec::with_capacity(4);
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next = 0usize;
            let last = *checkpoints.last().unwrap();
            for s in 1..=last {
                graph.neighbors_into(v, &mut scratch)?;
                v = scratch[rand::Rng::random_range(&mut rng, 0..scratch.len())];
                visited.insert(v);
                while next < checkpoints.len() && s == checkpoints[next] {
                    out.push(visited.len() as f64);
                    next += 1;
                }
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> EnsembleSpec {
        EnsembleSpec {
            space: SpaceDescriptor::euclidean(3),
            eps: 1.0,
            times: vec![0.5, 1.0, 2.0],
            n_paths: 16,
            dt: 1e-2,
            h: 0.25,
            seed: 90,
        }
    }

    #[test]
    fn reproducible_and_monotone() {
        let spec = small_spec();
        let a = run_ensemble(&spec).unwrap();
        let b = run_ensemble(&spec).unwrap();
        assert_eq!(a.means, b.means);
        assert_eq!(a.stderrs, b.stderrs);
        assert!(a.means.windows(2).all(|w| w[0] <= w[1]));
        assert!(a.stderrs.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn two_path_ensemble_is_reproducible() {
        let spec = EnsembleSpec {
            n_paths: 2,
            ..small_spec()
        };
        let a = run_ensemble(&spec).unwrap();
        let b = run_ensemble(&spec).unwrap();
        assert_eq!(a.means, b.means);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut s = small_spec();
        s.n_paths = 1;
        assert!(run_ensemble(&s).is_err());
        let mut s = small_spec();
        s.times = vec![2.0, 1.0];
        assert!(run_ensemble(&s).is_err());
        let mut s = small_spec();
        s.h = 0.3;
        assert!(run_ensemble(&s).is_err());
    }

    #[test]
    fn gasket_ensemble_counts_range() {
        let spec = EnsembleSpec {
            space: SpaceDescriptor::gasket(),
            eps: 1.0,
            times: vec![16.0, 64.0, 256.0],
            n_paths: 8,
            dt: 1.0,
            h: 0.125,
            seed: 4,
        };
        let r = run_ensemble(&spec).unwrap();
        assert!(r.means.windows(2).all(|w| w[0] < w[1]));
        assert!(r.means[0] > 1.0 && r.means[0] <= 17.0);
    }

    #[test]
    fn d3_mean_over_t_sits_above_capacity_and_decreases() {
        // Finite-horizon Spitzer behavior: mean/t decreasing in t, above
        // the capacity 2 pi.
        let spec = EnsembleSpec {
            space: SpaceDescriptor::euclidean(3),
            eps: 1.0,
            times: vec![5.0, 10.0, 20.0],
            n_paths: 600,
            dt: 2e-3,
            h: 0.125,
            seed: 11,
        };
        let r = run_ensemble(&spec).unwrap();
        let ratios: Vec<f64> = r.means.iter().zip(r.times()).map(|(m, t)| m / t).collect();
        assert!(ratios.windows(2).all(|w| w[0] > w[1]));
        let two_pi = std::f64::consts::TAU;
        for (j, rho) in ratios.iter().enumerate() {
            assert!(
                *rho > two_pi - 3.0 * r.stderrs[j] / r.times()[j],
                "ratio {rho} fell below capacity at t={}",
                r.times()[j]
            );
        }
    }
}
