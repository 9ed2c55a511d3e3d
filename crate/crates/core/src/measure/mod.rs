//! Measuring sampled paths: sausage volumes through the occupancy grid,
//! occupation times, and the discrete range and visit counts of graph
//! walks.

mod grid;

pub use grid::{BallStamper, OccupancyGrid, SausageAccumulator};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::diffusion::{PathPoints, SampledPath, MAX_DIM};
use crate::error::{Error, Result};

/// Systematic error bands carried alongside a sausage estimate: the
/// half-cell surface band of the grid, and the sampling band of the time
/// discretization (the excursion layer the grid-time path never visits,
/// of depth ~0.583 sqrt(dt) plus ~0.583 h/(2 sqrt(d)) for the inter-stamp
/// bridges, and the inter-stamp waist sliver).  All scale with the
/// estimated surface area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasBudget {
    pub grid_band: f64,
    pub step_band: f64,
}

/// One-sided discrete-supremum deficit of a unit-variance Gaussian walk
/// per sqrt(time step): zeta(1/2)/sqrt(2 pi).
pub const EXCURSION_LAYER_COEFF: f64 = 0.5826;

impl BiasBudget {
    pub fn for_estimate(value: f64, dim: usize, eps: f64, h: f64, step_gap: f64) -> Self {
        // Surface proxy of an eps-sausage of measure `value`.
        let d = dim as f64;
        let surface = d * value / eps;
        let gap = step_gap.max(h / 2.0);
        let dt_equiv = step_gap * step_gap / d;
        let layer = EXCURSION_LAYER_COEFF * (dt_equiv.sqrt() + h / (2.0 * d.sqrt()));
        BiasBudget {
            grid_band: 0.5 * h * surface,
            step_band: (layer + gap * gap / (8.0 * eps)) * surface,
        }
    }

    pub fn total(&self) -> f64 {
        self.grid_band + self.step_band
    }
}

/// Estimated measure of the eps-sausage of a path, with its discretization
/// parameters and error budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SausageEstimate {
    pub value: f64,
    pub eps: f64,
    pub horizon: f64,
    pub cell_size: f64,
    pub path_step: f64,
    pub occupied_cells: usize,
    pub bias: BiasBudget,
    /// Standard error of the mean when this estimate aggregates an
    /// ensemble; `None` for a single path.
    pub stderr: Option<f64>,
}

/// Measure of the eps-sausage of the whole path: every grid cell whose
/// center lies within `eps` of a stamped path point, weighted by
/// `density(cell center) * h^d`.
pub fn sausage_volume<F: Fn(&[f64]) -> f64>(
    path: &SampledPath,
    eps: f64,
    h: f64,
    density: &F,
) -> Result<SausageEstimate> {
    sausage_window(path, 0.0, path.total_time(), eps, h, density)
}

/// Sausage volume over the sub-interval `[s, t]` of the path clock.
pub fn sausage_window<F: Fn(&[f64]) -> f64>(
    path: &SampledPath,
    s: f64,
    t: f64,
    eps: f64,
    h: f64,
    density: &F,
) -> Result<SausageEstimate> {
    if path.is_empty() {
        return Err(Error::EmptyPath);
    }
    let (dim, coords) = path
        .euclidean_coords()
        .ok_or(Error::WrongPathKind {
            expected: "Euclidean",
        })?;
    if s > t {
        return Err(Error::invalid("s", "window start must not exceed its end"));
    }
    if s < 0.0 || t > path.total_time() + 0.5 * path.step {
        return Err(Error::invalid("t", "window exceeds the path horizon"));
    }
    let i0 = (s / path.step).round() as usize;
    let i1 = ((t / path.step).round() as usize).min(path.len() - 1);
    let mut acc = SausageAccumulator::new(dim, eps, h)?;
    for i in i0..=i1 {
        acc.observe(&coords[i * dim..(i + 1) * dim], density)?;
    }
    acc.flush(density)?;
    let value = acc.weight();
    let occupied = acc.occupied();
    let step_gap = typical_step(dim, path.step, &path.points);
    Ok(SausageEstimate {
        value,
        eps,
        horizon: (i1 - i0) as f64 * path.step,
        cell_size: h,
        path_step: path.step,
        occupied_cells: occupied,
        bias: BiasBudget::for_estimate(value, dim, eps, h, step_gap),
        stderr: None,
    })
}

fn typical_step(dim: usize, dt: f64, points: &PathPoints) -> f64 {
    match points {
        // RMS displacement of one Brownian step.
        PathPoints::Euclidean { .. } => (dim as f64 * dt).sqrt(),
        PathPoints::Gasket(_) => 1.0,
    }
}

/// Left-endpoint Riemann sum of the time the path spends in
/// `B(center, radius)`.
pub fn occupation_time(path: &SampledPath, center: &[f64], radius: f64) -> f64 {
    assert!(radius > 0.0);
    let r2 = radius * radius;
    let mut buf = [0.0f64; MAX_DIM];
    let mut inside = 0usize;
    for i in 0..path.len().saturating_sub(1) {
        let x = path.position(i, &mut buf);
        let d2: f64 = x
            .iter()
            .zip(center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d2 < r2 {
            inside += 1;
        }
    }
    inside as f64 * path.step
}

/// Number of distinct vertices a gasket walk visits.
pub fn graph_range(path: &SampledPath) -> Result<usize> {
    let vertices = path.gasket_vertices().ok_or(Error::WrongPathKind {
        expected: "gasket",
    })?;
    let mut seen = rustc_hash::FxHashSet::default();
    for &v in vertices {
        seen.insert(v);
    }
    Ok(seen.len())
}

/// Largest number of visits any single vertex receives.
pub fn max_visit_count(path: &SampledPath) -> Result<usize> {
    let vertices = path.gasket_vertices().ok_or(Error::WrongPathKind {
        expected: "gasket",
    })?;
    let mut counts: FxHashMap<_, usize> = FxHashMap::default();
    let mut best = 0usize;
    for &v in vertices {
        let c = counts.entry(v).or_insert(0);
        *c += 1;
        best = best.max(*c);
    }
    Ok(best)
}
