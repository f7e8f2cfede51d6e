//! Random point-set generation for the suites. Everything funnels through a
//! caller-supplied [`ChaCha8Rng`], so a suite's case seed fully determines
//! its data.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::compact::PointSet;
use crate::metric::Point;
use crate::sample::random_point;

/// Uniform set: size in `1..=max_size`, coordinates in `[min, max]^dim`.
/// (Deduplication can shrink the size; nonemptiness is guaranteed.)
pub fn random_point_set(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_size: usize,
    min: f64,
    max: f64,
) -> PointSet {
    let size = rng.random_range(1..=max_size.max(1));
    let pts: Vec<Point> = (0..size).map(|_| random_point(rng, dim, min, max)).collect();
    PointSet::new(pts).expect("sampled sets are nonempty and finite")
}

/// Nonempty random subset of `set` (each point kept with probability ½; one
/// random point is forced in when the coin flips all come up tails).
pub fn random_subset(rng: &mut ChaCha8Rng, set: &PointSet) -> PointSet {
    let mut keep: Vec<usize> = (0..set.len()).filter(|_| rng.random_range(0..2) == 0).collect();
    if keep.is_empty() {
        keep.push(rng.random_range(0..set.len()));
    }
    let pts: Vec<Point> = keep.iter().map(|&i| set.point_at(i)).collect();
    PointSet::new(pts).expect("subset of a valid set is valid")
}
