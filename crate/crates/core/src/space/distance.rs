//! Numerical Riemannian distance on radial conformal metrics.
//!
//! Shortest-path search on a mesh lattice with edge weight
//! `sqrt(G(midpoint)) * edge length`, 8-connected in 2D and 26-connected in
//! 3D.  This is a test-side instrument for checking the two-sided comparison
//! with the Euclidean distance; nothing in the simulation loops calls it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::space::profile::RadialMetricProfile;

struct HeapEntry {
    dist: f64,
    node: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
    }
}

const COORD_BITS: u32 = 21;
const COORD_OFFSET: i64 = 1 << (COORD_BITS - 1);

fn pack(coords: &[i32]) -> u64 {
    let mut key = 0u64;
    for &c in coords {
        let shifted = c as i64 + COORD_OFFSET;
        debug_assert!((0..(1 << COORD_BITS)).contains(&shifted));
        key = (key << COORD_BITS) | shifted as u64;
    }
    key
}

fn unpack(mut key: u64, dim: usize, out: &mut [i32]) {
    for k in (0..dim).rev() {
        out[k] = ((key & ((1 << COORD_BITS) - 1)) as i64 - COORD_OFFSET) as i32;
        key >>= COORD_BITS;
    }
}

/// Approximate the Riemannian distance between `x` and `y` for the metric
/// `G(|.|) I_d`.  The result lies within the two-sided Euclidean comparison
/// band up to the mesh discretization error.
pub fn riemannian_distance_bound(
    profile: &RadialMetricProfile,
    x: &[f64],
    y: &[f64],
    mesh: f64,
) -> Result<f64> {
    let dim = x.len();
    if dim != y.len() || !(2..=3).contains(&dim) {
        return Err(Error::invalid(
            "points",
            "expect matching coordinates in dimension 2 or 3",
        ));
    }
    if mesh <= 0.0 {
        return Err(Error::invalid("mesh", "must be positive"));
    }
    let sep = euclid(x, y);
    if sep == 0.0 {
        return Err(Error::invalid("points", "x and y must differ"));
    }
    if mesh >= sep / 4.0 {
        return Err(Error::MeshTooCoarse { mesh, sep });
    }

    // Any competitor path of Riemannian length <= 2*sep has Euclidean length
    // <= 2*sep, hence stays in an ellipse of semi-minor axis sqrt(3)/2*sep
    // around the segment; pad the search box accordingly.
    let pad = 0.9 * sep + 2.0 * mesh;
    let radius_cells: Vec<i32> = (0..dim)
        .map(|k| (((y[k] - x[k]).abs() + pad) / mesh).ceil() as i32)
        .collect();

    let target: Vec<i32> = (0..dim)
        .map(|k| ((y[k] - x[k]) / mesh).round() as i32)
        .collect();
    let snapped_y: Vec<f64> = (0..dim)
        .map(|k| x[k] + mesh * target[k] as f64)
        .collect();
    let snap_cost = euclid(&snapped_y, y) * profile.metric_factor(norm(y)).sqrt();

    // Offsets of the full Moore neighborhood, fixed order.
    let mut steps: Vec<Vec<i32>> = Vec::new();
    let mut odo = vec![-1i32; dim];
    loop {
        if odo.iter().any(|&c| c != 0) {
            steps.push(odo.clone());
        }
        let mut k = 0;
        loop {
            odo[k] += 1;
            if odo[k] <= 1 {
                break;
            }
            odo[k] = -1;
            k += 1;
            if k == dim {
                break;
            }
        }
        if k == dim {
            break;
        }
    }

    let start = pack(&vec![0i32; dim]);
    let goal = pack(&target);
    let mut best: FxHashMap<u64, f64> = FxHashMap::default();
    best.insert(start, 0.0);
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        dist: 0.0,
        node: start,
    });
    let mut coords = vec![0i32; dim];
    let mut here = vec![0.0f64; dim];
    let mut mid = vec![0.0f64; dim];

    while let Some(HeapEntry { dist, node }) = heap.pop() {
        if node == goal {
            return Ok(dist + snap_cost);
        }
        if best.get(&node).is_some_and(|&d| d < dist) {
            continue;
        }
        unpack(node, dim, &mut coords);
        for k in 0..dim {
            here[k] = x[k] + mesh * coords[k] as f64;
        }
        'steps: for step in &steps {
            let mut len2 = 0.0;
            for k in 0..dim {
                let next = coords[k] + step[k];
                if next.abs() > radius_cells[k] {
                    continue 'steps;
                }
                let dxk = mesh * step[k] as f64;
                mid[k] = here[k] + 0.5 * dxk;
                len2 += dxk * dxk;
            }
            let weight = profile.metric_factor(norm(&mid)).sqrt() * len2.sqrt();
            let next_coords: Vec<i32> = (0..dim).map(|k| coords[k] + step[k]).collect();
            let next_node = pack(&next_coords);
            let cand = dist + weight;
            let slot = best.entry(next_node).or_insert(f64::INFINITY);
            if cand < *slot {
                *slot = cand;
                heap.push(HeapEntry {
                    dist: cand,
                    node: next_node,
                });
            }
        }
    }
    Err(Error::invalid(
        "mesh",
        "search exhausted without reaching the target; box too small",
    ))
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}
