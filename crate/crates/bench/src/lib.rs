//! Shared fixtures for the benchmark targets: deterministic point clouds and
//! a reference map system, so results are comparable across runs.

use fhutch_core::{
    AffineMap, BMetric, FGenerator, FKind, IfsSystem, PointSet, TauGenerator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible cloud of exactly `n` points in `[-10, 10]^dim`.
pub fn cloud(seed: u64, dim: usize, n: usize) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * dim).map(|_| rng.random_range(-10.0..10.0)).collect();
    PointSet::from_flat(dim, coords).expect("fixture cloud is well-formed")
}

/// The half-scale three-map gasket system used across the iteration benches.
pub fn gasket_system() -> IfsSystem {
    let maps = vec![
        AffineMap::scale_translate(0.5, vec![0.0, 0.0]).unwrap(),
        AffineMap::scale_translate(0.5, vec![0.5, 0.0]).unwrap(),
        AffineMap::scale_translate(0.5, vec![0.25, 0.5]).unwrap(),
    ];
    IfsSystem::new(
        BMetric::Euclidean,
        maps,
        FGenerator::with_default_h(FKind::Log),
        TauGenerator::constant(0.05).unwrap(),
    )
    .unwrap()
}
