//! Path sampling engines: exact Brownian increments on R^d, Euler-Maruyama
//! for the radial conformal metric, and simple random walk on the
//! pre-gasket, plus hitting and exit times read off sampled paths.
//!
//! Sampling is embarrassingly parallel: every path owns a counter-based RNG
//! stream derived from `(master seed, path index)`, so identical specs give
//! bitwise-identical paths regardless of thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{GasketGraph, GasketVertex, RadialMetricProfile, SpaceDescriptor};

pub const MAX_DIM: usize = 6;

/// A deterministic RNG stream address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub path_index: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        RngSpec {
            master_seed,
            path_index,
        }
    }

    /// The derived stream; same spec, same bits.
    pub fn stream(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.path_index);
        rng
    }
}

/// Time-discretized trajectory, either coordinates in R^d (flat, stride
/// `dim`) or gasket vertices.
#[derive(Clone, Debug, PartialEq)]
pub enum PathPoints {
    Euclidean { dim: usize, coords: Vec<f64> },
    Gasket(Vec<GasketVertex>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    pub space: SpaceDescriptor,
    /// Uniform time step between consecutive points (one unit per graph
    /// step on the gasket).
    pub step: f64,
    pub points: PathPoints,
}

impl SampledPath {
    pub fn from_euclidean(space: SpaceDescriptor, step: f64, dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim >= 1 && coords.len().is_multiple_of(dim));
        SampledPath {
            space,
            step,
            points: PathPoints::Euclidean { dim, coords },
        }
    }

    pub fn len(&self) -> usize {
        match &self.points {
            PathPoints::Euclidean { dim, coords } => coords.len() / dim,
            PathPoints::Gasket(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_time(&self) -> f64 {
        (self.len().saturating_sub(1)) as f64 * self.step
    }

    pub fn dim(&self) -> usize {
        match &self.points {
            PathPoints::Euclidean { dim, .. } => *dim,
            PathPoints::Gasket(_) => 2,
        }
    }

    /// Coordinates of point `i` (gasket vertices are embedded in the
    /// plane).  Returns the filled prefix of a fixed-size buffer.
    pub fn position<'a>(&self, i: usize, buf: &'a mut [f64; MAX_DIM]) -> &'a [f64] {
        match &self.points {
            PathPoints::Euclidean { dim, coords } => {
                buf[..*dim].copy_from_slice(&coords[i * dim..(i + 1) * dim]);
                &buf[..*dim]
            }
            PathPoints::Gasket(v) => {
                let [x, y] = v[i].embed();
                buf[0] = x;
                buf[1] = y;
                &buf[..2]
            }
        }
    }

    pub fn gasket_vertices(&self) -> Option<&[GasketVertex]> {
        match &self.points {
            PathPoints::Gasket(v) => Some(v.as_slice()),
            _ => None,
        }
    }

    pub fn euclidean_coords(&self) -> Option<(usize, &[f64])> {
        match &self.points {
            PathPoints::Euclidean { dim, coords } => Some((*dim, coords.as_slice())),
            _ => None,
        }
    }
}

fn validate_horizon(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be strictly positive"));
    }
    if !(t >= dt) {
        return Err(Error::invalid("t", "horizon must be at least one step"));
    }
    Ok((t / dt).round().max(1.0) as usize)
}

/// One exact Brownian step per call: independent N(0, dt) increments per
/// coordinate (generator Laplacian/2).
#[derive(Clone, Copy, Debug)]
pub struct BmStepper {
    pub dim: usize,
    pub dt: f64,
    sqrt_dt: f64,
}

impl BmStepper {
    pub fn new(dim: usize, dt: f64) -> Self {
        BmStepper {
            dim,
            dt,
            sqrt_dt: dt.sqrt(),
        }
    }

    #[inline]
    pub fn step(&self, x: &mut [f64], rng: &mut ChaCha8Rng) {
        for xk in x[..self.dim].iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *xk += self.sqrt_dt * z;
        }
    }
}

/// Euler-Maruyama step for the generator of Brownian motion on the metric
/// `G(|x|) I_d`: radial drift `(d-2) G' / (4 G^2)` and per-coordinate
/// diffusion `G^(-1/2)`.  Drift vanishes identically on plateaus, and the
/// step consumes the RNG stream exactly like `BmStepper`.
#[derive(Clone, Debug)]
pub struct RadialStepper {
    pub dim: usize,
    pub dt: f64,
    sqrt_dt: f64,
    profile: RadialMetricProfile,
}

impl RadialStepper {
    pub fn new(dim: usize, dt: f64, profile: RadialMetricProfile) -> Self {
        RadialStepper {
            dim,
            dt,
            sqrt_dt: dt.sqrt(),
            profile,
        }
    }

    #[inline]
    pub fn step(&self, x: &mut [f64], rng: &mut ChaCha8Rng) {
        let r = x[..self.dim].iter().map(|a| a * a).sum::<f64>().sqrt();
        let (g, g_prime) = self.profile.factor_and_derivative(r);
        let diffusion = 1.0 / g.sqrt();
        // Radial drift coefficient against x/|x|; zero at the origin, which
        // always sits on a plateau.
        let drift_radial = if g_prime == 0.0 || r < 1e-300 {
            0.0
        } else {
            (self.dim as f64 - 2.0) * g_prime / (4.0 * g * g) / r
        };
        for xk in x[..self.dim].iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *xk += drift_radial * *xk * self.dt + diffusion * (self.sqrt_dt * z);
        }
    }

    /// Drift vector at `x`; exposed for invariant checks.
    pub fn drift_at(&self, x: &[f64]) -> Vec<f64> {
        let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let (g, g_prime) = self.profile.factor_and_derivative(r);
        if g_prime == 0.0 || r < 1e-300 {
            return vec![0.0; x.len()];
        }
        let c = (self.dim as f64 - 2.0) * g_prime / (4.0 * g * g) / r;
        x.iter().map(|&xk| c * xk).collect()
    }
}

/// Exact Brownian path from the origin.
pub fn sample_bm_path(dim: usize, t: f64, dt: f64, rng: &RngSpec) -> Result<SampledPath> {
    sample_bm_path_from(&vec![0.0; dim], t, dt, rng)
}

/// Exact Brownian path from a configurable start point.
pub fn sample_bm_path_from(start: &[f64], t: f64, dt: f64, rng: &RngSpec) -> Result<SampledPath> {
    let dim = start.len();
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::invalid("dim", "supported dimensions are 1..=6"));
    }
    let steps = validate_horizon(t, dt)?;
    let stepper = BmStepper::new(dim, dt);
    let mut stream = rng.stream();
    let mut coords = Vec::with_capacity((steps + 1) * dim);
    let mut x = [0.0; MAX_DIM];
    x[..dim].copy_from_slice(start);
    coords.extend_from_slice(&x[..dim]);
    for _ in 0..steps {
        stepper.step(&mut x[..dim], &mut stream);
        coords.extend_from_slice(&x[..dim]);
    }
    Ok(SampledPath::from_euclidean(
        SpaceDescriptor::euclidean(dim),
        dt,
        dim,
        coords,
    ))
}

/// Euler-Maruyama path on the radial metric, from the origin.
pub fn sample_radial_path(
    dim: usize,
    profile: &RadialMetricProfile,
    t: f64,
    dt: f64,
    rng: &RngSpec,
) -> Result<SampledPath> {
    sample_radial_path_from(&vec![0.0; dim], profile, t, dt, rng)
}

pub fn sample_radial_path_from(
    start: &[f64],
    profile: &RadialMetricProfile,
    t: f64,
    dt: f64,
    rng: &RngSpec,
) -> Result<SampledPath> {
    let dim = start.len();
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::DimensionTooLow { need: 2, got: dim });
    }
    let steps = validate_horizon(t, dt)?;
    let stepper = RadialStepper::new(dim, dt, profile.clone());
    let mut stream = rng.stream();
    let mut coords = Vec::with_capacity((steps + 1) * dim);
    let mut x = [0.0; MAX_DIM];
    x[..dim].copy_from_slice(start);
    coords.extend_from_slice(&x[..dim]);
    for _ in 0..steps {
        stepper.step(&mut x[..dim], &mut stream);
        coords.extend_from_slice(&x[..dim]);
    }
    Ok(SampledPath::from_euclidean(
        SpaceDescriptor::radial(dim, profile.clone()),
        dt,
        dim,
        coords,
    ))
}

/// Simple random walk on the pre-gasket from the origin corner, uniform
/// over neighbors.
pub fn sample_gasket_walk(graph: &GasketGraph, steps: usize, rng: &RngSpec) -> Result<SampledPath> {
    if steps < 1 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let mut stream = rng.stream();
    let mut vertices = Vec::with_capacity(steps + 1);
    let mut v = GasketVertex::ORIGIN;
    vertices.push(v);
    let mut scratch = Vec::with_capacity(4);
    for _ in 0..steps {
        graph.neighbors_into(v, &mut scratch)?;
        v = scratch[stream.random_range(0..scratch.len())];
        vertices.push(v);
    }
    Ok(SampledPath {
        space: SpaceDescriptor::gasket(),
        step: 1.0,
        points: PathPoints::Gasket(vertices),
    })
}

/// Edge-case convention for a start point already inside the target ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HittingMode {
    /// Report time 0 when the path starts inside.
    #[default]
    Inclusive,
    /// Skip the start point: first positive grid time inside.
    StrictPositive,
}

/// First grid time the path enters `B(center, eps)`, or `None` within the
/// horizon.  Detection happens at grid times only; the sub-step excursion
/// bias is part of the caller's error budget.
pub fn hitting_time(path: &SampledPath, center: &[f64], eps: f64) -> Option<f64> {
    hitting_time_with(path, center, eps, HittingMode::Inclusive)
}

pub fn hitting_time_with(
    path: &SampledPath,
    center: &[f64],
    eps: f64,
    mode: HittingMode,
) -> Option<f64> {
    assert!(eps > 0.0, "hitting_time requires eps > 0");
    let from = match mode {
        HittingMode::Inclusive => 0,
        HittingMode::StrictPositive => 1,
    };
    let eps2 = eps * eps;
    let mut buf = [0.0; MAX_DIM];
    for i in from..path.len() {
        let x = path.position(i, &mut buf);
        let d2: f64 = x
            .iter()
            .zip(center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d2 < eps2 {
            return Some(i as f64 * path.step);
        }
    }
    None
}

/// First grid time with `|X| >= R`, or `None` within the horizon.
pub fn exit_time(path: &SampledPath, radius: f64) -> Option<f64> {
    assert!(radius > 0.0, "exit_time requires R > 0");
    let r2 = radius * radius;
    let mut buf = [0.0; MAX_DIM];
    for i in 0..path.len() {
        let x = path.position(i, &mut buf);
        let d2: f64 = x.iter().map(|a| a * a).sum();
        if d2 >= r2 {
            return Some(i as f64 * path.step);
        }
    }
    None
}
