//! Finite point clouds standing in for compact sets, and the
//! Pompeiu–Hausdorff distance between them.
//!
//! For finite sets the Hausdorff distance is exact — no suprema to
//! approximate, just nested max/min scans:
//!
//! ```text
//! H(A, B) = max( max_{a∈A} d(a, B),  max_{b∈B} d(b, A) )
//! ```
//!
//! Two evaluators are provided: [`hausdorff`] scans all pairs, and
//! [`hausdorff_accelerated`] in [`grid`] prunes with a bucket grid. They are
//! written to return *identical* values and witnesses on every supported
//! metric — every candidate distance goes through the same [`BMetric::eval`]
//! code path and ties are broken by the same index rule — so the fast path
//! can be cross-audited against the slow one at full precision.

mod csv;
mod grid;

pub use csv::{read_point_set, write_point_set};
pub use grid::{hausdorff_accelerated, GridIndex};

use std::collections::HashSet;

use crate::error::Error;
use crate::metric::{normalize_zero, BMetric, Point};
use crate::Result;

/// A nonempty, deduplicated cloud of points in `ℝⁿ`, stored flat.
///
/// Duplicates are removed on construction (exact coordinate equality, first
/// occurrence wins) so that cardinality is honest set cardinality. Point
/// order is preserved and meaningful for reproducibility: every algorithm in
/// the crate visits points in storage order.
#[derive(Clone, Debug)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidParameter("point set must be nonempty".into()));
        };
        let dim = first.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(dim, coords)
    }

    /// Build from row-major flat coordinates (`len` must be a multiple of
    /// `dim`). Rejects non-finite entries, normalizes `-0.0`, dedups.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point set must be nonempty".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "flat coordinate buffer of length {} is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        let mut clean = Vec::with_capacity(coords.len());
        for &c in &coords {
            if !c.is_finite() {
                return Err(Error::NonFinite { what: "point coordinate", value: c });
            }
            clean.push(normalize_zero(c));
        }

        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut deduped = Vec::with_capacity(clean.len());
        for row in clean.chunks_exact(dim) {
            if seen.insert(bit_key(row)) {
                deduped.extend_from_slice(row);
            }
        }
        Ok(PointSet { dim, coords: deduped })
    }

    /// Convenience constructor from rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            coords.extend_from_slice(r);
        }
        Self::from_flat(dim.max(1), coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Point sets are never empty; this exists for clippy's sake.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of the `i`-th point.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Owned copy of the `i`-th point.
    pub fn point_at(&self, i: usize) -> Point {
        Point::new(self.point(i).to_vec()).expect("stored coordinates are finite")
    }

    /// Flat row-major view of all coordinates.
    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Exact membership test.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim && self.iter().any(|q| q == p)
    }

    /// Set union; `self`'s points first, then `other`'s new ones.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coords = Vec::with_capacity(self.coords.len() + other.coords.len());
        coords.extend_from_slice(&self.coords);
        coords.extend_from_slice(&other.coords);
        PointSet::from_flat(self.dim, coords)
    }

    /// Componentwise bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.point(0).to_vec();
        let mut hi = lo.clone();
        for p in self.iter() {
            for k in 0..self.dim {
                if p[k] < lo[k] {
                    lo[k] = p[k];
                }
                if p[k] > hi[k] {
                    hi[k] = p[k];
                }
            }
        }
        (lo, hi)
    }

    /// Euclidean diagonal of the bounding box; zero for a singleton.
    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    /// Largest pairwise distance under `metric`. Quadratic scan — meant for
    /// diagnostics and tests, not for hot loops.
    pub fn diameter(&self, metric: &BMetric) -> Result<f64> {
        check_metric_dim(metric, self.dim)?;
        let mut best = 0.0_f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d = metric.eval_unchecked(self.point(i), self.point(j));
                if d > best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// Thin the cloud to one representative per grid cell of side `cell`:
    /// the first point (in storage order) landing in each cell survives.
    ///
    /// Each dropped point sits in the same cell as its survivor, so the
    /// Hausdorff distance between the set and its decimation is at most the
    /// cell diagonal `cell·√n` (in the euclidean sense; power metrics scale
    /// accordingly).
    pub fn decimate(&self, cell: f64) -> Result<PointSet> {
        if !(cell.is_finite() && cell > 0.0) {
            return Err(Error::NonPositive { what: "decimation cell", value: cell });
        }
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut coords = Vec::new();
        for p in self.iter() {
            let key = grid_key(p, cell)?;
            if seen.insert(key) {
                coords.extend_from_slice(p);
            }
        }
        PointSet::from_flat(self.dim, coords)
    }
}

/// How far a point can move when snapped to a grid of side `cell`, measured
/// in `metric`: the euclidean displacement is at most the cell diagonal
/// `cell·√n`, and a power-`q` metric maps that to `(cell·√n)^q`.
pub fn decimation_displacement(metric: &BMetric, dim: usize, cell: f64) -> f64 {
    let euclid = cell * (dim as f64).sqrt();
    match metric.euclidean_power() {
        Some(q) => euclid.powf(q),
        None => euclid,
    }
}

/// Set equality: same points regardless of storage order.
impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        let keys: HashSet<Vec<u64>> = self.iter().map(bit_key).collect();
        other.iter().all(|p| keys.contains(&bit_key(p)))
    }
}

impl Eq for PointSet {}

/// Bit-pattern key for exact dedup/membership. Safe because construction
/// normalized `-0.0` and excluded NaN.
fn bit_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|c| c.to_bits()).collect()
}

/// Integer cell coordinates of `p` on a grid of side `cell`.
fn grid_key(p: &[f64], cell: f64) -> Result<Vec<i64>> {
    p.iter()
        .map(|&c| {
            let k = (c / cell).floor();
            // f64 → i64 casts saturate; beyond ±2^62 cells the key would
            // collapse distinct far-apart cells, so refuse instead.
            if k.abs() >= 4.6e18 {
                return Err(Error::InvalidParameter(format!(
                    "cell {cell} is too small relative to coordinate {c}"
                )));
            }
            Ok(k as i64)
        })
        .collect()
}

fn check_metric_dim(metric: &BMetric, dim: usize) -> Result<()> {
    if let Some(n) = metric.required_dim() {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: dim });
        }
    }
    Ok(())
}

/// Distance from a single point to a set: `d(x, B) = min_{b∈B} d(x, b)`.
pub fn point_to_set(x: &[f64], b: &PointSet, metric: &BMetric) -> Result<f64> {
    if x.len() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), got: x.len() });
    }
    check_metric_dim(metric, b.dim())?;
    Ok(nearest_in(x, b, metric).1)
}

/// Index and distance of the nearest point of `b` to `x`; ties keep the
/// earliest index. Shapes must be pre-validated.
pub(crate) fn nearest_in(x: &[f64], b: &PointSet, metric: &BMetric) -> (usize, f64) {
    let mut best = f64::INFINITY;
    let mut best_idx = 0;
    for (j, q) in b.iter().enumerate() {
        let d = metric.eval_unchecked(x, q);
        if d < best {
            best = d;
            best_idx = j;
        }
    }
    (best_idx, best)
}

/// One-sided (directed) Hausdorff distance `max_{a∈A} d(a, B)` with the
/// attaining pair of indices `(into A, into B)`. Ties keep the earliest
/// query index, and within a query the earliest candidate index.
pub fn directed_distance(
    a: &PointSet,
    b: &PointSet,
    metric: &BMetric,
) -> Result<(f64, (usize, usize))> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    check_metric_dim(metric, a.dim())?;
    let mut worst = -1.0_f64;
    let mut pair = (0, 0);
    for (i, p) in a.iter().enumerate() {
        let (j, d) = nearest_in(p, b, metric);
        if d > worst {
            worst = d;
            pair = (i, j);
        }
    }
    Ok((worst.max(0.0), pair))
}

/// The Hausdorff distance together with the pairs that attain each side.
#[derive(Clone, Debug)]
pub struct HausdorffValue {
    /// `H(A, B)`.
    pub value: f64,
    /// `(a, nearest b)` attaining `max_{a∈A} d(a, B)`.
    pub forward: (Point, Point),
    /// Indices of `forward` into `(A, B)`.
    pub forward_idx: (usize, usize),
    /// `(b, nearest a)` attaining `max_{b∈B} d(b, A)`.
    pub backward: (Point, Point),
    /// Indices of `backward` into `(B, A)`.
    pub backward_idx: (usize, usize),
}

/// Exact Hausdorff distance by full pairwise scan.
pub fn hausdorff(a: &PointSet, b: &PointSet, metric: &BMetric) -> Result<HausdorffValue> {
    let (fwd, fwd_idx) = directed_distance(a, b, metric)?;
    let (bwd, bwd_idx) = directed_distance(b, a, metric)?;
    Ok(HausdorffValue {
        value: fwd.max(bwd),
        forward: (a.point_at(fwd_idx.0), b.point_at(fwd_idx.1)),
        forward_idx: fwd_idx,
        backward: (b.point_at(bwd_idx.0), a.point_at(bwd_idx.1)),
        backward_idx: bwd_idx,
    })
}

/// Hausdorff distance through the fastest correct route: the grid-
/// accelerated evaluator when the metric supports it and the workload is
/// big enough to pay for index construction, the pairwise scan otherwise.
/// Both routes return identical results, so callers never see the switch.
pub fn hausdorff_auto(a: &PointSet, b: &PointSet, metric: &BMetric) -> Result<HausdorffValue> {
    const PAIR_CUTOVER: usize = 16_384;
    if metric.euclidean_power().is_some() && a.len().saturating_mul(b.len()) > PAIR_CUTOVER {
        hausdorff_accelerated(a, b, metric)
    } else {
        hausdorff(a, b, metric)
    }
}
