//! The infinite one-sided pre-Sierpinski gasket with unit edges.
//!
//! Vertices carry integer coordinates `(a, b)` in the oblique basis
//! `e1 = (1, 0)`, `e2 = (1/2, sqrt(3)/2)`, so the wedge grows rightward and
//! upward from the origin corner.  The upward unit triangle with lower-left
//! corner `(a, b)` belongs to the gasket exactly when `a & b == 0`: the
//! binary digits of `(a, b)` are the triangle address, one sub-triangle
//! choice per level, and a carry marks a hole.  Adjacency therefore needs no
//! stored graph at all; the bitwise test plays the role of lazy growth and
//! makes every query reentrant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GasketVertex {
    pub a: i64,
    pub b: i64,
}

impl GasketVertex {
    pub const ORIGIN: GasketVertex = GasketVertex { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> Self {
        GasketVertex { a, b }
    }

    /// Position in the Euclidean plane.
    pub fn embed(&self) -> [f64; 2] {
        let a = self.a as f64;
        let b = self.b as f64;
        [a + 0.5 * b, b * 0.75f64.sqrt()]
    }

    /// Euclidean distance of the embedded vertex from the origin corner.
    pub fn radius(&self) -> f64 {
        let [x, y] = self.embed();
        x.hypot(y)
    }
}

/// Is the upward unit triangle with lower-left corner `(a, b)` present?
#[inline]
fn up_triangle(a: i64, b: i64) -> bool {
    a >= 0 && b >= 0 && (a & b) == 0
}

/// The six lattice directions that can carry gasket edges, with the upward
/// triangle validating each; the fixed order keeps neighbor lists
/// deterministic.
const NEIGHBOR_RULES: [((i64, i64), (i64, i64)); 6] = [
    ((1, 0), (0, 0)),
    ((-1, 0), (-1, 0)),
    ((0, 1), (0, 0)),
    ((0, -1), (0, -1)),
    ((-1, 1), (-1, 0)),
    ((1, -1), (0, -1)),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasketGraph;

impl GasketGraph {
    pub fn new() -> Self {
        GasketGraph
    }

    pub fn contains(&self, v: GasketVertex) -> bool {
        up_triangle(v.a, v.b) || up_triangle(v.a - 1, v.b) || up_triangle(v.a, v.b - 1)
    }

    /// Neighbors of `v` in a fixed deterministic order.
    pub fn neighbors(&self, v: GasketVertex) -> Result<Vec<GasketVertex>> {
        let mut out = Vec::with_capacity(4);
        self.neighbors_into(v, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant for hot loops.
    pub fn neighbors_into(&self, v: GasketVertex, out: &mut Vec<GasketVertex>) -> Result<()> {
        if !self.contains(v) {
            return Err(Error::InvalidGasketAddress { a: v.a, b: v.b });
        }
        out.clear();
        for &((da, db), (ta, tb)) in &NEIGHBOR_RULES {
            if up_triangle(v.a + ta, v.b + tb) {
                out.push(GasketVertex::new(v.a + da, v.b + db));
            }
        }
        Ok(())
    }

    pub fn degree(&self, v: GasketVertex) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }

    /// Number of vertices within graph distance `radius` of the origin.
    pub fn ball_size(&self, radius: u32) -> usize {
        use std::collections::VecDeque;
        let mut seen = rustc_hash::FxHashSet::default();
        let mut queue = VecDeque::new();
        seen.insert(GasketVertex::ORIGIN);
        queue.push_back((GasketVertex::ORIGIN, 0u32));
        let mut scratch = Vec::new();
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            self.neighbors_into(v, &mut scratch)
                .expect("BFS only visits valid vertices");
            for &w in &scratch {
                if seen.insert(w) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        seen.len()
    }
}
