//! Occupancy grid with spatial hashing and the ball stamper that feeds it.
//!
//! Cells are axis-aligned cubes of side `h`; a cell is occupied when its
//! center lies within `eps` of some stamped path point (cell-center
//! inclusion rule).  Occupied cells are keyed by their packed integer
//! coordinates, so no bounding box is ever needed.  Stamping a ball skips
//! cells already covered by the previous stamp center, which keeps the cost
//! of a stamp proportional to the newly swept crescent.

use rustc_hash::FxHashSet;

use crate::diffusion::MAX_DIM;
use crate::error::{Error, Result};

const COORD_BITS: u32 = 21;
const COORD_OFFSET: i64 = 1 << (COORD_BITS - 1);
const COORD_LIMIT: i64 = COORD_OFFSET - 1;

#[inline]
fn pack_cells(cells: &[i64]) -> u128 {
    let mut key = 0u128;
    for &c in cells {
        key = (key << COORD_BITS) | (c + COORD_OFFSET) as u128;
    }
    key
}

#[inline]
fn unpack_cells(mut key: u128, dim: usize, out: &mut [i64]) {
    for k in (0..dim).rev() {
        out[k] = (key & ((1 << COORD_BITS) - 1)) as i64 - COORD_OFFSET;
        key >>= COORD_BITS;
    }
}

/// Hash set of occupied cells plus the accumulated measure weight.
#[derive(Clone, Debug)]
pub struct OccupancyGrid {
    dim: usize,
    h: f64,
    cell_volume: f64,
    cells: FxHashSet<u128>,
    weight: f64,
}

impl OccupancyGrid {
    pub fn new(dim: usize, h: f64) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        assert!(h > 0.0);
        OccupancyGrid {
            dim,
            h,
            cell_volume: h.powi(dim as i32),
            cells: FxHashSet::default(),
            weight: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_size(&self) -> f64 {
        self.h
    }

    /// Accumulated measure: the sum of `density(cell center) * h^d` over
    /// distinct occupied cells.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn occupied(&self) -> usize {
        self.cells.len()
    }

    pub fn contains_key(&self, key: u128) -> bool {
        self.cells.contains(&key)
    }

    /// Insert a cell; re-inserting an occupied cell leaves the accumulator
    /// unchanged.  Returns whether the cell was new.
    #[inline]
    pub fn insert_weighted(&mut self, key: u128, density_at_center: f64) -> bool {
        if self.cells.insert(key) {
            self.weight += density_at_center * self.cell_volume;
            true
        } else {
            false
        }
    }

    /// Measure of the cells of `self` not occupied in `other`.
    pub fn weight_excluding<F: Fn(&[f64]) -> f64>(&self, other: &OccupancyGrid, density: F) -> f64 {
        let mut cells = [0i64; MAX_DIM];
        let mut center = [0.0f64; MAX_DIM];
        let mut sum = 0.0;
        for &key in &self.cells {
            if other.contains_key(key) {
                continue;
            }
            unpack_cells(key, self.dim, &mut cells);
            for k in 0..self.dim {
                center[k] = (cells[k] as f64 + 0.5) * self.h;
            }
            sum += density(&center[..self.dim]) * self.cell_volume;
        }
        sum
    }
}

/// Precomputed column layout for stamping an `eps`-ball onto a grid of
/// pitch `h`.  Candidate cells are organized into columns along axis 0:
/// for each transverse offset tuple the in-ball cells form one contiguous
/// index interval, so a stamp enumerates exactly the cells of the new ball
/// minus the interval already covered by the previous stamp.
#[derive(Clone, Debug)]
pub struct BallStamper {
    dim: usize,
    eps: f64,
    eps2: f64,
    h: f64,
    /// Flat `[columns x (dim-1)]` transverse integer offsets (empty tuples
    /// collapse to a single column in dimension 1).
    col_int: Vec<i64>,
    /// The same offsets scaled by `h`.
    col_scaled: Vec<f64>,
    columns: usize,
    max_offset: i64,
}

impl BallStamper {
    pub fn new(dim: usize, eps: f64, h: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid("dim", "supported dimensions are 1..=6"));
        }
        if !(eps > 0.0) {
            return Err(Error::invalid("eps", "must be strictly positive"));
        }
        if !(h > 0.0) || h > eps / 4.0 {
            return Err(Error::GridTooCoarse { h, eps });
        }
        let reach = (eps / h + 0.5).ceil() as i64;
        let eps2 = eps * eps;
        let mut col_int = Vec::new();
        let mut col_scaled = Vec::new();
        let tdim = dim - 1;
        if tdim == 0 {
            // One empty transverse tuple.
            return Ok(BallStamper {
                dim,
                eps,
                eps2,
                h,
                col_int,
                col_scaled,
                columns: 1,
                max_offset: reach,
            });
        }
        // Keep every transverse tuple that might host a center within eps
        // of some point of the base cell: the per-axis minimal distance is
        // (|o_k| - 0.5) h, clamped at zero.
        let mut odo = vec![-reach; tdim];
        'outer: loop {
            let min_d2: f64 = odo
                .iter()
                .map(|&o| {
                    let m = ((o.abs() as f64) - 0.5).max(0.0) * h;
                    m * m
                })
                .sum();
            if min_d2 < eps2 {
                col_int.extend(odo.iter().copied());
                col_scaled.extend(odo.iter().map(|&o| o as f64 * h));
            }
            let mut k = 0;
            loop {
                odo[k] += 1;
                if odo[k] <= reach {
                    break;
                }
                odo[k] = -reach;
                k += 1;
                if k == tdim {
                    break 'outer;
                }
            }
        }
        let columns = col_int.len() / tdim;
        Ok(BallStamper {
            dim,
            eps,
            eps2,
            h,
            col_int,
            col_scaled,
            columns,
            max_offset: reach,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn column_count(&self) -> usize {
        self.columns
    }

    /// Stamp the ball `B(x, eps)`.  Cells already covered by `B(prev, eps)`
    /// are skipped without touching the hash set: they were inserted when
    /// `prev` was stamped.
    pub fn stamp<F: Fn(&[f64]) -> f64>(
        &self,
        grid: &mut OccupancyGrid,
        x: &[f64],
        prev: Option<&[f64]>,
        density: &F,
    ) -> Result<()> {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(grid.dim, self.dim);
        let dim = self.dim;
        let tdim = dim - 1;
        let h = self.h;
        let inv_h = 1.0 / h;
        let mut base_cell = [0i64; MAX_DIM];
        let mut base = [0.0f64; MAX_DIM];
        let mut prev_base = [0.0f64; MAX_DIM];
        for k in 0..dim {
            let c = (x[k] / h).floor() as i64;
            if c.abs() + self.max_offset + 1 >= COORD_LIMIT {
                return Err(Error::CellIndexOverflow);
            }
            base_cell[k] = c;
            // Offset of the base cell's center from x, so a candidate cell
            // center sits at base + offset*h relative to x.
            base[k] = (c as f64 + 0.5) * h - x[k];
            if let Some(p) = prev {
                prev_base[k] = (c as f64 + 0.5) * h - p[k];
            }
        }
        let eps2 = self.eps2;
        let mut center = [0.0f64; MAX_DIM];
        let mut cells = [0i64; MAX_DIM];

        for j in 0..self.columns {
            let row = &self.col_scaled[j * tdim..j * tdim + tdim];
            let mut col_d2 = 0.0;
            for k in 0..tdim {
                let t = base[k + 1] + row[k];
                col_d2 += t * t;
            }
            if col_d2 >= eps2 {
                continue;
            }
            // Axis-0 cell index interval strictly inside the new ball:
            // base0 + o*h in (-w, w).
            let w = (eps2 - col_d2).sqrt();
            let lo = ((-w - base[0]) * inv_h).floor() as i64 + 1;
            let hi = ((w - base[0]) * inv_h).ceil() as i64 - 1;
            if lo > hi {
                continue;
            }
            // Interval already covered by the previous stamp, if any.
            let (skip_lo, skip_hi) = match prev {
                Some(_) => {
                    let mut pcol_d2 = 0.0;
                    for k in 0..tdim {
                        let t = prev_base[k + 1] + row[k];
                        pcol_d2 += t * t;
                    }
                    if pcol_d2 < eps2 {
                        let wp = (eps2 - pcol_d2).sqrt();
                        let plo = ((-wp - prev_base[0]) * inv_h).floor() as i64 + 1;
                        let phi = ((wp - prev_base[0]) * inv_h).ceil() as i64 - 1;
                        (plo, phi)
                    } else {
                        (1, 0)
                    }
                }
                None => (1, 0),
            };

            let irow = &self.col_int[j * tdim..j * tdim + tdim];
            for k in 0..tdim {
                cells[k + 1] = base_cell[k + 1] + irow[k];
                center[k + 1] = x[k + 1] + base[k + 1] + row[k];
            }
            let mut emit = |o_lo: i64, o_hi: i64, grid: &mut OccupancyGrid| {
                for o in o_lo..=o_hi {
                    cells[0] = base_cell[0] + o;
                    let key = pack_cells(&cells[..dim]);
                    if grid.cells.insert(key) {
                        center[0] = x[0] + base[0] + o as f64 * h;
                        grid.weight += density(&center[..dim]) * grid.cell_volume;
                    }
                }
            };
            if skip_lo > skip_hi {
                emit(lo, hi, grid);
            } else {
                if lo < skip_lo {
                    emit(lo, (skip_lo - 1).min(hi), grid);
                }
                if hi > skip_hi {
                    emit((skip_hi + 1).max(lo), hi, grid);
                }
            }
        }
        Ok(())
    }
}

/// Streaming sausage-volume accumulator: feed path points in order, read
/// the measure at any time.  A stamp is laid whenever the displacement
/// since the last stamp reaches half a cell, and `flush` guarantees the
/// final point is stamped before a readout.
pub struct SausageAccumulator {
    grid: OccupancyGrid,
    stamper: BallStamper,
    last_stamp: Option<[f64; MAX_DIM]>,
    pending: Option<[f64; MAX_DIM]>,
    skip_threshold2: f64,
}

impl SausageAccumulator {
    pub fn new(dim: usize, eps: f64, h: f64) -> Result<Self> {
        let stamper = BallStamper::new(dim, eps, h)?;
        Ok(SausageAccumulator {
            grid: OccupancyGrid::new(dim, h),
            stamper,
            last_stamp: None,
            pending: None,
            skip_threshold2: (h / 2.0) * (h / 2.0),
        })
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn into_grid(self) -> OccupancyGrid {
        self.grid
    }

    pub fn eps(&self) -> f64 {
        self.stamper.eps()
    }

    fn buffer(x: &[f64]) -> [f64; MAX_DIM] {
        let mut buf = [0.0f64; MAX_DIM];
        buf[..x.len()].copy_from_slice(x);
        buf
    }

    pub fn observe<F: Fn(&[f64]) -> f64>(&mut self, x: &[f64], density: &F) -> Result<()> {
        let dim = self.grid.dim;
        match self.last_stamp {
            None => {
                self.stamper.stamp(&mut self.grid, x, None, density)?;
                self.last_stamp = Some(Self::buffer(x));
                self.pending = None;
            }
            Some(last) => {
                let d2: f64 = x
                    .iter()
                    .zip(&last[..dim])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 >= self.skip_threshold2 {
                    self.stamper
                        .stamp(&mut self.grid, x, Some(&last[..dim]), density)?;
                    self.last_stamp = Some(Self::buffer(x));
                    self.pending = None;
                } else {
                    self.pending = Some(Self::buffer(x));
                }
            }
        }
        Ok(())
    }

    /// Stamp the most recent unstamped point, if any.
    pub fn flush<F: Fn(&[f64]) -> f64>(&mut self, density: &F) -> Result<()> {
        if let Some(p) = self.pending.take() {
            let dim = self.grid.dim;
            let prev = self.last_stamp;
            self.stamper.stamp(
                &mut self.grid,
                &p[..dim],
                prev.as_ref().map(|b| &b[..dim]),
                density,
            )?;
            self.last_stamp = Some(p);
        }
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        self.grid.weight()
    }

    pub fn occupied(&self) -> usize {
        self.grid.occupied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pack_roundtrip() {
        let cells = [-5i64, 1017, 0, -131_000];
        let key = pack_cells(&cells);
        let mut out = [0i64; MAX_DIM];
        unpack_cells(key, 4, &mut out);
        assert_eq!(&out[..4], &cells);
    }

    #[test]
    fn stationary_disk_area() {
        let one = |_: &[f64]| 1.0;
        let mut acc = SausageAccumulator::new(2, 1.0, 0.125).unwrap();
        acc.observe(&[0.3, -0.2], &one).unwrap();
        acc.flush(&one).unwrap();
        // pi within the perimeter-cell band of 3h.
        assert!((acc.weight() - std::f64::consts::PI).abs() < 3.0 * 0.125);
    }

    #[test]
    fn reinserting_cells_does_not_double_count() {
        let one = |_: &[f64]| 1.0;
        let mut acc = SausageAccumulator::new(2, 1.0, 0.2).unwrap();
        acc.observe(&[0.0, 0.0], &one).unwrap();
        let w1 = acc.weight();
        let n1 = acc.occupied();
        // Re-stamping the same point changes nothing.
        for _ in 0..5 {
            acc.observe(&[0.0, 0.0], &one).unwrap();
            acc.flush(&one).unwrap();
        }
        assert_eq!(acc.weight(), w1);
        assert_eq!(acc.occupied(), n1);
    }

    #[test]
    fn crescent_skip_matches_full_stamping() {
        // Walking a path with the previous-ball skip must occupy exactly
        // the cells of stamping every ball without the skip.
        let one = |_: &[f64]| 1.0;
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.07;
                [t * 0.9 + (3.0 * t).sin() * 0.2, (2.0 * t).cos() * 0.4]
            })
            .collect();
        let mut with_skip = SausageAccumulator::new(2, 0.8, 0.1).unwrap();
        for p in &pts {
            with_skip.observe(p, &one).unwrap();
        }
        with_skip.flush(&one).unwrap();

        let stamper = BallStamper::new(2, 0.8, 0.1).unwrap();
        let mut plain = OccupancyGrid::new(2, 0.1);
        // Stamp exactly the positions the accumulator stamped: every point
        // at distance >= h/2 from the previous stamp plus the endpoint.
        let mut stamped: Vec<[f64; 2]> = vec![pts[0]];
        for p in &pts[1..] {
            let last = stamped.last().unwrap();
            let d2 = (p[0] - last[0]).powi(2) + (p[1] - last[1]).powi(2);
            if d2 >= 0.05f64 * 0.05 {
                stamped.push(*p);
            }
        }
        if stamped.last() != pts.last().as_deref() {
            stamped.push(*pts.last().unwrap());
        }
        for p in &stamped {
            stamper.stamp(&mut plain, p, None, &one).unwrap();
        }
        assert_eq!(with_skip.occupied(), plain.occupied());
        assert_relative_eq!(with_skip.weight(), plain.weight(), max_relative = 1e-12);
    }

    #[test]
    fn weight_excluding_partitions_the_union() {
        let one = |_: &[f64]| 1.0;
        let stamper = BallStamper::new(2, 0.6, 0.12).unwrap();
        let mut a = OccupancyGrid::new(2, 0.12);
        stamper.stamp(&mut a, &[0.0, 0.0], None, &one).unwrap();
        let mut b = OccupancyGrid::new(2, 0.12);
        stamper.stamp(&mut b, &[0.4, 0.1], None, &one).unwrap();
        let mut union = OccupancyGrid::new(2, 0.12);
        stamper.stamp(&mut union, &[0.0, 0.0], None, &one).unwrap();
        stamper.stamp(&mut union, &[0.4, 0.1], None, &one).unwrap();
        let b_minus_a = b.weight_excluding(&a, one);
        assert_relative_eq!(
            a.weight() + b_minus_a,
            union.weight(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_coarse_grids() {
        assert!(BallStamper::new(2, 1.0, 0.26).is_err());
        assert!(BallStamper::new(2, 1.0, 0.25).is_ok());
    }

    #[test]
    fn overflow_detected_far_from_origin() {
        let one = |_: &[f64]| 1.0;
        let stamper = BallStamper::new(1, 1.0, 0.25).unwrap();
        let mut grid = OccupancyGrid::new(1, 0.25);
        let far = 0.25 * (COORD_LIMIT as f64);
        assert!(matches!(
            stamper.stamp(&mut grid, &[far], None, &one),
            Err(Error::CellIndexOverflow)
        ));
    }
}
