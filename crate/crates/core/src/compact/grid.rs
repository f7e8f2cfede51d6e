//! Bucket-grid nearest-neighbour index and the accelerated Hausdorff
//! evaluator built on it.
//!
//! The index hashes points into cubical cells and answers nearest-neighbour
//! queries by scanning cells ring by ring (Chebyshev distance in cell
//! coordinates) around the query. Every cell of ring `r ≥ 1` lies at
//! euclidean distance at least `(r−1)·cell` from the query point, so once
//! the best distance found beats that bound the scan can stop.
//!
//! Parity with the brute-force evaluator is a hard requirement, not a
//! best-effort goal:
//!
//! * candidate distances are computed by the *same* [`BMetric::eval`] code
//!   path, so scanned candidates produce bit-identical values;
//! * ties are broken by smallest point index, independent of scan order;
//! * the stop bound is shaved by a relative `1e-12` before use, so rounding
//!   in the bound can only cause one extra ring to be scanned — never a
//!   skipped candidate whose distance ties or beats the current best.
//!
//! Together these make [`hausdorff_accelerated`] return the same value *and*
//! the same witness pairs as [`hausdorff`](super::hausdorff), which is what
//! lets tests cross-audit one against the other at full precision.

use std::collections::HashMap;

use crate::compact::{HausdorffValue, PointSet};
use crate::error::Error;
use crate::metric::BMetric;
use crate::Result;

/// Spatial hash of one point set, self-contained (owns a copy of the
/// coordinates it indexes).
#[derive(Clone, Debug)]
pub struct GridIndex {
    dim: usize,
    cell: f64,
    coords: Vec<f64>,
    buckets: HashMap<Vec<i64>, Vec<u32>>,
    /// Componentwise bounds of occupied cell keys.
    key_lo: Vec<i64>,
    key_hi: Vec<i64>,
}

impl GridIndex {
    /// Index `set` on a grid of side `cell`.
    pub fn build(set: &PointSet, cell: f64) -> Result<Self> {
        if !(cell.is_finite() && cell > 0.0) {
            return Err(Error::NonPositive { what: "index cell", value: cell });
        }
        let dim = set.dim();
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        let mut key_lo = vec![i64::MAX; dim];
        let mut key_hi = vec![i64::MIN; dim];
        for (i, p) in set.iter().enumerate() {
            let key = cell_key(p, cell)?;
            for k in 0..dim {
                key_lo[k] = key_lo[k].min(key[k]);
                key_hi[k] = key_hi[k].max(key[k]);
            }
            buckets.entry(key).or_default().push(i as u32);
        }
        Ok(GridIndex { dim, cell, coords: set.flat().to_vec(), buckets, key_lo, key_hi })
    }

    /// Index with an automatic cell: bounding-box diagonal over the
    /// dim-th root of the point count, so occupancy stays O(1) per cell for
    /// roughly uniform data. Degenerate (single-cell) data gets cell 1.
    pub fn build_auto(set: &PointSet) -> Result<Self> {
        Self::build(set, auto_cell(set))
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn point(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Index and distance (under `metric`) of the nearest indexed point to
    /// `q`; ties resolve to the smallest index. `qpow` is the metric's
    /// euclidean power, passed in so the caller validates support once.
    ///
    /// Returns an error only when `q` lies so far outside the indexed box
    /// that its cell key cannot be represented; callers fall back to the
    /// brute scan in that case.
    pub fn nearest(&self, q: &[f64], metric: &BMetric, qpow: f64) -> Result<(usize, f64)> {
        debug_assert_eq!(q.len(), self.dim);
        let qkey = cell_key(q, self.cell)?;

        let mut best = f64::INFINITY;
        let mut best_idx = u32::MAX;

        // Ring of the nearest occupied cell: no smaller ring has data.
        let r_start = chebyshev_to_box(&qkey, &self.key_lo, &self.key_hi);
        // Ring of the farthest occupied cell: no larger ring has data.
        let r_end = chebyshev_to_farthest(&qkey, &self.key_lo, &self.key_hi);

        for r in r_start..=r_end {
            if best_idx != u32::MAX {
                // Unscanned rings sit at euclidean distance ≥ (r−1)·cell.
                let lb_eu = (r.saturating_sub(1)) as f64 * self.cell;
                if lb_eu > 0.0 {
                    let lb = lb_eu.powf(qpow) * (1.0 - 1e-12);
                    if lb > best {
                        break;
                    }
                }
            }
            self.for_each_ring_bucket(&qkey, r, |indices| {
                for &idx in indices {
                    let d = metric.eval_unchecked(q, self.point(idx));
                    // Smallest index wins ties, independent of scan order.
                    if d < best || (d == best && idx < best_idx) {
                        best = d;
                        best_idx = idx;
                    }
                }
            });
        }
        debug_assert_ne!(best_idx, u32::MAX, "every indexed set is nonempty");
        Ok((best_idx as usize, best))
    }

    /// Call `f` on every occupied bucket whose key is at Chebyshev distance
    /// exactly `r` from `center`, restricted to the occupied key box.
    fn for_each_ring_bucket(&self, center: &[i64], r: u64, mut f: impl FnMut(&[u32])) {
        // Clamped per-axis ranges; empty intersection means an empty ring.
        let mut lo = vec![0i64; self.dim];
        let mut hi = vec![0i64; self.dim];
        for k in 0..self.dim {
            lo[k] = center[k].saturating_sub(r as i64).max(self.key_lo[k]);
            hi[k] = center[k].saturating_add(r as i64).min(self.key_hi[k]);
            if lo[k] > hi[k] {
                return;
            }
        }
        let mut key = lo.clone();
        'odometer: loop {
            let cheb = key
                .iter()
                .zip(center)
                .map(|(a, b)| a.abs_diff(*b))
                .max()
                .unwrap_or(0);
            if cheb == r {
                if let Some(indices) = self.buckets.get(&key) {
                    f(indices);
                }
            }
            for k in 0..self.dim {
                if key[k] < hi[k] {
                    key[k] += 1;
                    continue 'odometer;
                }
                key[k] = lo[k];
            }
            break;
        }
    }
}

/// Heuristic index cell for a set: bbox diagonal scaled so that uniform
/// data lands a handful of points per cell.
pub(crate) fn auto_cell(set: &PointSet) -> f64 {
    let diag = set.bbox_diagonal();
    if diag > 0.0 {
        diag / (set.len() as f64).powf(1.0 / set.dim() as f64)
    } else {
        1.0
    }
}

fn cell_key(p: &[f64], cell: f64) -> Result<Vec<i64>> {
    p.iter()
        .map(|&c| {
            let k = (c / cell).floor();
            if k.abs() >= 4.6e18 {
                return Err(Error::InvalidParameter(format!(
                    "index cell {cell} is too small relative to coordinate {c}"
                )));
            }
            Ok(k as i64)
        })
        .collect()
}

/// Smallest Chebyshev distance from `key` to the box `[lo, hi]` (0 inside).
fn chebyshev_to_box(key: &[i64], lo: &[i64], hi: &[i64]) -> u64 {
    let mut worst = 0u64;
    for k in 0..key.len() {
        let gap = if key[k] < lo[k] {
            key[k].abs_diff(lo[k])
        } else if key[k] > hi[k] {
            key[k].abs_diff(hi[k])
        } else {
            0
        };
        worst = worst.max(gap);
    }
    worst
}

/// Largest Chebyshev distance from `key` to any corner of `[lo, hi]`.
fn chebyshev_to_farthest(key: &[i64], lo: &[i64], hi: &[i64]) -> u64 {
    let mut worst = 0u64;
    for k in 0..key.len() {
        worst = worst.max(key[k].abs_diff(lo[k]).max(key[k].abs_diff(hi[k])));
    }
    worst
}

/// Grid-accelerated Hausdorff distance. Identical output to
/// [`hausdorff`](super::hausdorff) — value, witnesses, and indices — on
/// every metric that is a monotone power of the euclidean distance;
/// [`Error::UnsupportedMetric`] otherwise.
pub fn hausdorff_accelerated(
    a: &PointSet,
    b: &PointSet,
    metric: &BMetric,
) -> Result<HausdorffValue> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if let Some(n) = metric.required_dim() {
        if a.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
        }
    }
    let Some(qpow) = metric.euclidean_power() else {
        return Err(Error::UnsupportedMetric(metric.to_string()));
    };

    // Key overflow (coordinates astronomically far apart relative to the
    // cell) is the one geometry the grid cannot represent; the brute scan
    // computes the identical answer, so take it rather than refuse.
    let (index_a, index_b) = match (GridIndex::build_auto(a), GridIndex::build_auto(b)) {
        (Ok(ia), Ok(ib)) => (ia, ib),
        (Err(Error::InvalidParameter(_)), _) | (_, Err(Error::InvalidParameter(_))) => {
            return super::hausdorff(a, b, metric)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };

    let forward = match directed_indexed(a, &index_b, metric, qpow)? {
        Some(v) => v,
        None => return super::hausdorff(a, b, metric),
    };
    let backward = match directed_indexed(b, &index_a, metric, qpow)? {
        Some(v) => v,
        None => return super::hausdorff(a, b, metric),
    };

    Ok(HausdorffValue {
        value: forward.0.max(backward.0),
        forward: (a.point_at(forward.1 .0), b.point_at(forward.1 .1)),
        forward_idx: forward.1,
        backward: (b.point_at(backward.1 .0), a.point_at(backward.1 .1)),
        backward_idx: backward.1,
    })
}

/// Directed distance of `queries` against an indexed target. `Ok(None)`
/// means a query fell outside the representable key range and the caller
/// should use the brute path.
fn directed_indexed(
    queries: &PointSet,
    target: &GridIndex,
    metric: &BMetric,
    qpow: f64,
) -> Result<Option<(f64, (usize, usize))>> {
    let mut worst = -1.0_f64;
    let mut pair = (0usize, 0usize);
    for (i, q) in queries.iter().enumerate() {
        let (j, d) = match target.nearest(q, metric, qpow) {
            Ok(hit) => hit,
            Err(Error::InvalidParameter(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if d > worst {
            worst = d;
            pair = (i, j);
        }
    }
    Ok(Some((worst.max(0.0), pair)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::hausdorff;
    use crate::sample::{random_point, SampleSpec};
    use rand::Rng;

    fn random_set(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, max_len: usize) -> PointSet {
        let len = rng.random_range(1..=max_len);
        let pts = (0..len).map(|_| random_point(rng, dim, -10.0, 10.0)).collect();
        PointSet::new(pts).unwrap()
    }

    fn assert_same_answer(a: &PointSet, b: &PointSet, metric: &BMetric) {
        let brute = hausdorff(a, b, metric).unwrap();
        let fast = hausdorff_accelerated(a, b, metric).unwrap();
        assert_eq!(
            brute.value.to_bits(),
            fast.value.to_bits(),
            "value mismatch: brute {} vs fast {}",
            brute.value,
            fast.value
        );
        assert_eq!(brute.forward_idx, fast.forward_idx, "forward witness");
        assert_eq!(brute.backward_idx, fast.backward_idx, "backward witness");
    }

    #[test]
    fn accelerated_equals_brute_on_random_clouds() {
        let metrics = [
            BMetric::Euclidean,
            BMetric::snowflake(BMetric::Euclidean, 2.0).unwrap(),
            BMetric::snowflake(BMetric::Euclidean, 1.5).unwrap(),
        ];
        let mut rng = SampleSpec::default().rng();
        for metric in &metrics {
            for dim in [1, 2, 3] {
                for _ in 0..25 {
                    let a = random_set(&mut rng, dim, 60);
                    let b = random_set(&mut rng, dim, 60);
                    assert_same_answer(&a, &b, metric);
                }
            }
        }
    }

    /// Regular lattices are the adversarial case for witness parity: many
    /// exactly-equal candidate distances force the tie-break rule to do
    /// real work.
    #[test]
    fn accelerated_equals_brute_on_lattices_with_ties() {
        let mut pts_a = Vec::new();
        let mut pts_b = Vec::new();
        for i in 0..12 {
            for j in 0..12 {
                pts_a.push(crate::metric::Point::new(vec![i as f64, j as f64]).unwrap());
                // Offset lattice: every b-point is equidistant from four
                // a-points and vice versa.
                pts_b.push(crate::metric::Point::new(vec![i as f64 + 0.5, j as f64 + 0.5]).unwrap());
            }
        }
        let a = PointSet::new(pts_a).unwrap();
        let b = PointSet::new(pts_b).unwrap();
        for metric in [BMetric::Euclidean, BMetric::snowflake(BMetric::Euclidean, 2.0).unwrap()] {
            assert_same_answer(&a, &b, &metric);
        }
    }

    #[test]
    fn accelerated_handles_one_dimension_and_abs_diff() {
        let mut rng = SampleSpec::default().rng();
        for _ in 0..20 {
            let a = random_set(&mut rng, 1, 40);
            let b = random_set(&mut rng, 1, 40);
            assert_same_answer(&a, &b, &BMetric::AbsDiff);
            let snow = BMetric::snowflake(BMetric::AbsDiff, 3.0).unwrap();
            assert_same_answer(&a, &b, &snow);
        }
    }

    #[test]
    fn widely_separated_clusters_exercise_ring_skipping() {
        let a = PointSet::from_rows(&[&[0.0, 0.0], &[0.1, 0.0], &[0.0, 0.1]]).unwrap();
        let b = PointSet::from_rows(&[&[1000.0, 1000.0], &[1000.1, 1000.0]]).unwrap();
        assert_same_answer(&a, &b, &BMetric::Euclidean);
    }

    #[test]
    fn singleton_and_degenerate_sets() {
        let a = PointSet::from_rows(&[&[3.0, 4.0]]).unwrap();
        let b = PointSet::from_rows(&[&[0.0, 0.0]]).unwrap();
        let h = hausdorff_accelerated(&a, &b, &BMetric::Euclidean).unwrap();
        assert_eq!(h.value, 5.0);
        assert_same_answer(&a, &a, &BMetric::Euclidean);
    }

    #[test]
    fn unsupported_metric_is_refused() {
        // A future non-euclidean metric would land here; today the enum is
        // all-euclidean, so force the error through the public contract.
        // Every current metric reports a euclidean power:
        for metric in [BMetric::Euclidean, BMetric::AbsDiff] {
            assert!(metric.euclidean_power().is_some());
        }
        // The refusal path is still reachable through nearest() key
        // overflow, which silently falls back to the brute route:
        let a = PointSet::from_rows(&[&[1e300]]).unwrap();
        let b = PointSet::from_rows(&[&[0.0]]).unwrap();
        let brute = hausdorff(&a, &b, &BMetric::AbsDiff).unwrap();
        let fast = hausdorff_accelerated(&a, &b, &BMetric::AbsDiff).unwrap();
        assert_eq!(brute.value, fast.value);
    }

    #[test]
    fn index_rejects_bad_cells() {
        let s = PointSet::from_rows(&[&[0.0]]).unwrap();
        assert!(GridIndex::build(&s, 0.0).is_err());
        assert!(GridIndex::build(&s, f64::NAN).is_err());
        assert!(GridIndex::build(&s, -2.0).is_err());
    }
}
