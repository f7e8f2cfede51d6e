//! Chaos-game sampling: instead of iterating the union operator on whole
//! sets, follow a single orbit that picks a random map at each step. The
//! orbit distribution fills the attractor, and a seeded generator makes the
//! produced cloud bit-identical across runs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compact::PointSet;
use crate::error::Error;
use crate::metric::Point;
use crate::Result;

use super::IfsSystem;

/// Orbit parameters for [`IfsSystem::chaos_game`].
#[derive(Clone, Debug)]
pub struct ChaosParams {
    /// Orbit start.
    pub start: Point,
    /// Total orbit length, including burn-in.
    pub n_points: usize,
    /// Leading steps discarded while the orbit falls into the attractor.
    pub burn_in: usize,
    pub seed: u64,
}

impl IfsSystem {
    /// Run the chaos game and collect the post-burn-in orbit as a set.
    /// Deterministic in `params.seed`; map choices are uniform.
    pub fn chaos_game(&self, params: &ChaosParams) -> Result<PointSet> {
        if params.start.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: params.start.dim(),
            });
        }
        if params.n_points <= params.burn_in {
            return Err(Error::InvalidParameter(format!(
                "orbit length {} must exceed burn-in {}",
                params.n_points, params.burn_in
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut x: Vec<f64> = params.start.coords().to_vec();
        let mut coords = Vec::with_capacity((params.n_points - params.burn_in) * self.dim());
        for k in 0..params.n_points {
            let pick = rng.random_range(0..self.maps().len());
            x = self.maps()[pick].apply(&x);
            if k >= params.burn_in {
                coords.extend_from_slice(&x);
            }
        }
        PointSet::from_flat(self.dim(), coords)
    }
}
