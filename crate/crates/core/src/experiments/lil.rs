//! Single-path traces scaled by the iterated-logarithm normalizers, for
//! inspecting almost-sure growth bands.

use serde::{Deserialize, Serialize};

use crate::asymptotics::lil_normalizers;
use crate::diffusion::{sample_gasket_walk, BmStepper, RngSpec, MAX_DIM};
use crate::error::{Error, Result};
use crate::measure::{graph_range, SausageAccumulator};
use crate::space::{GasketGraph, ScalingFunction, SpaceDescriptor};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LilConfig {
    pub space: SpaceDescriptor,
    pub volume: ScalingFunction,
    pub time_scale: ScalingFunction,
    pub eps: f64,
    /// Horizon: steps for the gasket walk, time units otherwise.
    pub horizon: f64,
    /// Continuum discretization (ignored by the gasket walk).
    pub dt: f64,
    pub h: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LilTrace {
    /// Dyadic readout clocks.
    pub times: Vec<f64>,
    /// Raw volume (graph range or sausage measure).
    pub raw: Vec<f64>,
    /// raw / (t / f(t/loglog t)).
    pub sup_scaled: Vec<f64>,
    /// raw / min(V(phi^{-1}(t/loglog t)), t / f(t/loglog t)).
    pub inf_scaled: Vec<f64>,
}

impl LilTrace {
    /// Extremes of both scaled series over the last two dyadic decades.
    pub fn late_band(&self) -> (f64, f64) {
        let n = self.times.len();
        let from = n.saturating_sub(7);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in from..n {
            lo = lo.min(self.sup_scaled[i]).min(self.inf_scaled[i]);
            hi = hi.max(self.sup_scaled[i]).max(self.inf_scaled[i]);
        }
        (lo, hi)
    }
}

/// Run one long path and emit its volume over dyadic clocks, scaled by both
/// normalizers.  The normalizers need `t > e^2`, so readouts start at 8.
pub fn lil_trace(config: &LilConfig) -> Result<LilTrace> {
    if config.horizon < (std::f64::consts::E * std::f64::consts::E).ceil() {
        return Err(Error::invalid("horizon", "need horizon above e^2"));
    }
    config.volume.validate()?;
    config.time_scale.validate()?;
    let mut times = Vec::new();
    let mut t = 8.0;
    while t <= config.horizon {
        times.push(t);
        t *= 2.0;
    }

    let raw: Vec<f64> = match &config.space {
        SpaceDescriptor::GasketWalk { .. } => {
            let graph = GasketGraph::new();
            let steps = config.horizon as usize;
            let walk = sample_gasket_walk(&graph, steps, &RngSpec::new(config.seed, 0))?;
            let vertices = walk.gasket_vertices().unwrap();
            times
                .iter()
                .map(|&t| {
                    let upto = (t as usize).min(vertices.len() - 1);
                    let partial = crate::diffusion::SampledPath {
                        space: config.space.clone(),
                        step: 1.0,
                        points: crate::diffusion::PathPoints::Gasket(
                            vertices[..=upto].to_vec(),
                        ),
                    };
                    graph_range(&partial).map(|r| r as f64)
                })
                .collect::<Result<_>>()?
        }
        SpaceDescriptor::EuclideanBm { dim } => {
            let dim = *dim;
            let stepper = BmStepper::new(dim, config.dt);
            let mut rng = RngSpec::new(config.seed, 0).stream();
            let mut acc = SausageAccumulator::new(dim, config.eps, config.h)?;
            let one = |_: &[f64]| 1.0;
            let mut x = [0.0f64; MAX_DIM];
            acc.observe(&x[..dim], &one)?;
            let checkpoints: Vec<usize> = times
                .iter()
                .map(|t| (t / config.dt).round() as usize)
                .collect();
            let mut out = Vec::with_capacity(times.len());
            let mut next = 0usize;
            for s in 1..=*checkpoints.last().unwrap() {
                stepper.step(&mut x[..dim], &mut rng);
                acc.observe(&x[..dim], &one)?;
                while next < checkpoints.len() && s == checkpoints[next] {
                    acc.flush(&one)?;
                    out.push(acc.weight());
                    next += 1;
                }
            }
            out
        }
        SpaceDescriptor::RadialMetricBm { .. } => {
            return Err(Error::invalid(
                "space",
                "the trace targets recurrent spaces: gasket or low-dimensional Brownian motion",
            ))
        }
    };

    let mut sup_scaled = Vec::with_capacity(times.len());
    let mut inf_scaled = Vec::with_capacity(times.len());
    for (&t, &v) in times.iter().zip(&raw) {
        let (sup_n, inf_n) = lil_normalizers(&config.volume, &config.time_scale, t)?;
        sup_scaled.push(v / sup_n);
        inf_scaled.push(v / inf_n);
    }
    Ok(LilTrace {
        times,
        raw,
        sup_scaled,
        inf_scaled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::gasket_exponents;

    #[test]
    fn gasket_trace_stays_in_band_and_is_monotone() {
        let config = LilConfig {
            space: SpaceDescriptor::gasket(),
            volume: ScalingFunction::pure(gasket_exponents::alpha()),
            time_scale: ScalingFunction::pure(gasket_exponents::beta()),
            eps: 1.0,
            horizon: 1_000_000.0,
            dt: 1.0,
            h: 0.125,
            seed: 60,
        };
        let trace = lil_trace(&config).unwrap();
        assert!(trace.raw.windows(2).all(|w| w[0] <= w[1]));
        let (lo, hi) = trace.late_band();
        assert!(
            lo > 0.05 && hi < 20.0,
            "scaled range escaped the band: [{lo}, {hi}]"
        );
        // Normalizer values come straight from the analytic module.
        let t = *trace.times.last().unwrap();
        let (sup_n, _) = lil_normalizers(&config.volume, &config.time_scale, t).unwrap();
        let v = *trace.raw.last().unwrap();
        assert!((trace.sup_scaled.last().unwrap() - v / sup_n).abs() < 1e-12);
    }

    #[test]
    fn planar_brownian_trace_runs_and_is_monotone() {
        // Weakly recurrent continuum case: V = r^2, phi = r^2, f = log.
        let config = LilConfig {
            space: SpaceDescriptor::euclidean(2),
            volume: ScalingFunction::pure(2.0),
            time_scale: ScalingFunction::pure(2.0),
            eps: 0.5,
            horizon: 512.0,
            dt: 0.01,
            h: 0.0625,
            seed: 61,
        };
        let trace = lil_trace(&config).unwrap();
        assert!(trace.raw.windows(2).all(|w| w[0] <= w[1]));
        assert!(trace.sup_scaled.iter().all(|&v| v.is_finite() && v > 0.0));
    }

    #[test]
    fn horizon_below_e_squared_rejected() {
        let config = LilConfig {
            space: SpaceDescriptor::gasket(),
            volume: ScalingFunction::pure(1.5),
            time_scale: ScalingFunction::pure(2.3),
            eps: 1.0,
            horizon: 6.0,
            dt: 1.0,
            h: 0.125,
            seed: 0,
        };
        assert!(lil_trace(&config).is_err());
    }
}
