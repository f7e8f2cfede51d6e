//! Affine map systems, the set-valued union operator, and fixed-point
//! iteration towards the attractor.
//!
//! Given contractive maps `f₁ … f_N` on `ℝⁿ`, the union operator sends a
//! finite set `A` to `T(A) = f₁(A) ∪ … ∪ f_N(A)`. Iterating `T` from any
//! seed converges (in Hausdorff distance) to the system's attractor; with
//! `N > 1` the iterates grow like `Nᵐ`, so the driver thins each iterate to
//! one representative point per grid cell and the convergence tolerance is
//! read relative to that resolution.

mod certify;
mod chaos;

pub use certify::{
    CertificateReport, CiricWeight, CorollaryForm, CrossCheck, InequalityId, Violation,
};
pub use chaos::ChaosParams;

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compact::{hausdorff_auto, PointSet};
use crate::error::Error;
use crate::metric::{normalize_zero, BMetric, FGenerator, TauGenerator};
use crate::Result;

/// An affine self-map `x ↦ Lx + t` of `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    dim: usize,
    /// Row-major `n × n` linear part.
    linear: Vec<f64>,
    translation: Vec<f64>,
    declared_lipschitz: Option<f64>,
    /// Sampled lower bound for the euclidean operator norm of `linear`.
    norm_estimate: f64,
}

impl AffineMap {
    /// Build and validate a map. A declared Lipschitz constant is checked
    /// against a sampled lower bound for the operator norm: declaring a
    /// constant smaller than what the samples already exhibit is an error
    /// (up to 1e-9 slack for rounding).
    pub fn new(
        linear: Vec<Vec<f64>>,
        translation: Vec<f64>,
        declared_lipschitz: Option<f64>,
    ) -> Result<Self> {
        let dim = translation.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("affine map needs dimension ≥ 1".into()));
        }
        if linear.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "matrix has {} rows, expected {dim}",
                linear.len()
            )));
        }
        let mut flat = Vec::with_capacity(dim * dim);
        for (i, row) in linear.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "matrix row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonFinite { what: "matrix entry", value: v });
                }
                flat.push(v);
            }
        }
        for &v in &translation {
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "translation entry", value: v });
            }
        }

        let norm_estimate = operator_norm_lower_bound(&flat, dim);
        if let Some(c) = declared_lipschitz {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "declared Lipschitz constant must be finite and ≥ 0, got {c}"
                )));
            }
            if c < norm_estimate - 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "declared Lipschitz constant {c} is below the sampled operator norm {norm_estimate}"
                )));
            }
        }

        Ok(AffineMap { dim, linear: flat, translation, declared_lipschitz, norm_estimate })
    }

    /// Uniform scaling by `s` plus translation — the common IFS building
    /// block `x ↦ s·x + t`.
    pub fn scale_translate(s: f64, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { s } else { 0.0 }).collect())
            .collect();
        AffineMap::new(rows, translation, Some(s.abs()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row `i` of the linear part.
    pub fn linear_row(&self, i: usize) -> &[f64] {
        &self.linear[i * self.dim..(i + 1) * self.dim]
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn declared_lipschitz(&self) -> Option<f64> {
        self.declared_lipschitz
    }

    /// The sampled operator-norm lower bound computed at construction.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    /// Apply to a coordinate slice.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let mut y = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut acc = self.translation[i];
            let row = self.linear_row(i);
            for j in 0..self.dim {
                acc += row[j] * x[j];
            }
            y.push(normalize_zero(acc));
        }
        y
    }

    /// Image of a whole set (deduplicated — non-injective maps may merge
    /// points).
    pub fn image(&self, a: &PointSet) -> Result<PointSet> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
        }
        let mut coords = Vec::with_capacity(a.flat().len());
        for p in a.iter() {
            coords.extend_from_slice(&self.apply(p));
        }
        PointSet::from_flat(self.dim, coords)
    }
}

/// Deterministic sampled lower bound for `‖L‖₂`: axis images, a bundle of
/// seeded random unit directions, and a short power iteration. Every term
/// is `‖Lu‖` for some unit `u`, hence a genuine lower bound.
fn operator_norm_lower_bound(flat: &[f64], dim: usize) -> f64 {
    let apply = |u: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|i| (0..dim).map(|j| flat[i * dim + j] * u[j]).sum())
            .collect()
    };
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();

    let mut best = 0.0_f64;
    // Axis directions: column norms.
    for j in 0..dim {
        let mut u = vec![0.0; dim];
        u[j] = 1.0;
        best = best.max(norm(&apply(&u)));
    }
    // Random unit directions, fixed seed so construction is reproducible.
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AFF_1E5E);
    for _ in 0..256 {
        let u: Vec<f64> = (0..dim)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..=1.0))
            .collect();
        let len = norm(&u);
        if len > 1e-3 {
            let unit: Vec<f64> = u.iter().map(|c| c / len).collect();
            best = best.max(norm(&apply(&unit)));
        }
    }
    // Power iteration on the Gram map u ↦ Lᵀ(Lu) sharpens the bound for
    // matrices whose top direction random sampling misses in 3-D.
    let mut u = vec![1.0 / (dim as f64).sqrt(); dim];
    for _ in 0..64 {
        let lu = apply(&u);
        // v = Lᵀ (Lu)
        let v: Vec<f64> = (0..dim)
            .map(|j| (0..dim).map(|i| flat[i * dim + j] * lu[i]).sum())
            .collect();
        let len = norm(&v);
        if len < 1e-300 {
            break;
        }
        u = v.iter().map(|c| c / len).collect();
        best = best.max(norm(&apply(&u)));
    }
    best
}

/// An iterated function system: maps, ambient b-metric, and the generator /
/// gap pair its contraction certificates are stated with.
#[derive(Clone, Debug)]
pub struct IfsSystem {
    metric: BMetric,
    maps: Vec<AffineMap>,
    f: FGenerator,
    tau: TauGenerator,
    dim: usize,
}

impl IfsSystem {
    pub fn new(
        metric: BMetric,
        maps: Vec<AffineMap>,
        f: FGenerator,
        tau: TauGenerator,
    ) -> Result<Self> {
        let Some(first) = maps.first() else {
            return Err(Error::InvalidParameter("system needs at least one map".into()));
        };
        let dim = first.dim();
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::InvalidParameter(format!(
                    "map {i} has dimension {}, expected {dim}",
                    m.dim()
                )));
            }
        }
        if let Some(n) = metric.required_dim() {
            if dim != n {
                return Err(Error::DimensionMismatch { expected: n, got: dim });
            }
        }
        Ok(IfsSystem { metric, maps, f, tau, dim })
    }

    pub fn metric(&self) -> &BMetric {
        &self.metric
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn f(&self) -> &FGenerator {
        &self.f
    }

    pub fn tau(&self) -> &TauGenerator {
        &self.tau
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One application of the union operator: images in map order, each in
    /// point order, deduplicated.
    pub fn step(&self, a: &PointSet) -> Result<PointSet> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
        }
        let mut coords = Vec::with_capacity(a.flat().len() * self.maps.len());
        for map in &self.maps {
            for p in a.iter() {
                coords.extend_from_slice(&map.apply(p));
            }
        }
        PointSet::from_flat(self.dim, coords)
    }

    /// Constant gap derived from declared Lipschitz constants for the `log`
    /// generator: with every map `c`-Lipschitz in the metric (constant
    /// `cᵠ` for a power-`q` metric), any gap below `−ln(max cᵢᵠ)` makes the
    /// pointwise inequality hold; this returns that bound shaved by `1e-3`.
    ///
    /// `None` when a map lacks a declared constant, the generator is not
    /// `log`, the metric has no euclidean power, or the maps are not
    /// contractive enough for a positive gap to exist.
    pub fn derived_log_tau(&self) -> Option<TauGenerator> {
        if self.f.kind() != crate::metric::FKind::Log {
            return None;
        }
        let q = self.metric.euclidean_power()?;
        let mut worst = 0.0_f64;
        for m in &self.maps {
            worst = worst.max(m.declared_lipschitz()?.powf(q));
        }
        let tau = -worst.ln() - 1e-3;
        if tau > 0.0 {
            TauGenerator::constant(tau).ok()
        } else {
            None
        }
    }

    /// Iterate the union operator from `seed` until the step distance
    /// `H(Aₘ, Aₘ₊₁)` falls to `tol`, recording one trace row per step.
    ///
    /// With `params.cell` set, each iterate is decimated to that grid —
    /// essential for multi-map systems whose raw iterates grow
    /// exponentially. The returned residual is measured against the
    /// *undecimated* image `T(U)` of the final set, so thinning cannot hide
    /// a bad fixed point.
    pub fn iterate(&self, seed: &PointSet, params: &IterateParams) -> Result<(AttractorResult, IterationTrace)> {
        params.validate()?;
        if seed.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: seed.dim() });
        }

        /// Steps without a new best step-distance before declaring a stall.
        const STALL_WINDOW: usize = 20;

        let mut current = seed.clone();
        let mut steps = Vec::new();
        let mut stop = StopReason::MaxIter;
        let mut iterations = params.max_iter;
        let mut best_h = f64::INFINITY;
        let mut stale = 0usize;

        for m in 0..params.max_iter {
            let t0 = Instant::now();
            let image = self.step(&current)?;
            let next = match params.cell {
                Some(cell) => image.decimate(cell)?,
                None => image,
            };
            let h = hausdorff_auto(&current, &next, &self.metric)?.value;
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            steps.push(StepRecord { m, cardinality: current.len(), h_step: h, ms });

            current = next;
            if h <= params.tol {
                stop = StopReason::Converged;
                iterations = m;
                break;
            }
            if h < best_h {
                best_h = h;
                stale = 0;
            } else {
                stale += 1;
                if stale >= STALL_WINDOW {
                    stop = StopReason::Stalled;
                    iterations = m;
                    break;
                }
            }
        }

        let residual = hausdorff_auto(&current, &self.step(&current)?, &self.metric)?.value;
        let result = AttractorResult {
            attractor: current,
            residual,
            iterations,
            cell: params.cell,
            stop,
        };
        Ok((result, IterationTrace { steps, stop }))
    }

    /// The iterates `[A₀, A₁, …, A_steps]`, optionally decimated, with a
    /// growth guard instead of an out-of-memory surprise.
    pub fn trajectory(
        &self,
        seed: &PointSet,
        steps: usize,
        cell: Option<f64>,
    ) -> Result<Vec<PointSet>> {
        const MAX_POINTS: usize = 2_000_000;
        if seed.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: seed.dim() });
        }
        let mut out = Vec::with_capacity(steps + 1);
        out.push(seed.clone());
        for _ in 0..steps {
            let image = self.step(out.last().expect("nonempty"))?;
            let next = match cell {
                Some(c) => image.decimate(c)?,
                None => image,
            };
            if next.len() > MAX_POINTS {
                return Err(Error::Precondition(format!(
                    "trajectory grew past {MAX_POINTS} points; decimate with a coarser cell"
                )));
            }
            out.push(next);
        }
        Ok(out)
    }
}

/// Stopping parameters for [`IfsSystem::iterate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateParams {
    /// Declare convergence when `H(Aₘ, Aₘ₊₁) ≤ tol`.
    pub tol: f64,
    /// Hard cap on steps.
    pub max_iter: usize,
    /// Decimation grid side; `None` iterates on raw images.
    pub cell: Option<f64>,
}

impl IterateParams {
    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::NonPositive { what: "iteration tolerance", value: self.tol });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if let Some(c) = self.cell {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::NonPositive { what: "decimation cell", value: c });
            }
        }
        Ok(())
    }
}

/// Why the iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum StopReason {
    #[serde(rename = "converged")]
    Converged,
    #[serde(rename = "max-iter")]
    MaxIter,
    #[serde(rename = "stalled")]
    Stalled,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Converged => "converged",
            StopReason::MaxIter => "max-iter",
            StopReason::Stalled => "stalled",
        })
    }
}

/// One row of the iteration trace.
#[derive(Clone, Copy, Debug)]
pub struct StepRecord {
    /// Step index, 0-based.
    pub m: usize,
    /// `|Aₘ|` before the step.
    pub cardinality: usize,
    /// `H(Aₘ, Aₘ₊₁)`.
    pub h_step: f64,
    /// Wall-clock milliseconds for the step.
    pub ms: f64,
}

/// Full per-step record of one iteration run.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub steps: Vec<StepRecord>,
    pub stop: StopReason,
}

impl IterationTrace {
    /// CSV with header `m,card,h_step,ms`, one row per step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,card,h_step,ms\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{},{}\n", s.m, s.cardinality, s.h_step, s.ms));
        }
        out
    }

    /// The step distances `H(Aₘ, Aₘ₊₁)` in order.
    pub fn step_distances(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.h_step).collect()
    }
}

/// Where the iteration landed.
#[derive(Clone, Debug)]
pub struct AttractorResult {
    /// Final iterate `U ≈` attractor.
    pub attractor: PointSet,
    /// `H(U, T(U))` against the undecimated image.
    pub residual: f64,
    /// Step index at which the run stopped.
    pub iterations: usize,
    /// Decimation cell the run used, if any.
    pub cell: Option<f64>,
    pub stop: StopReason,
}

impl AttractorResult {
    /// Metadata as a JSON object (the attractor itself travels as CSV).
    pub fn metadata_json(&self) -> String {
        let value = serde_json::json!({
            "iterations": self.iterations,
            "residual": self.residual,
            "cell": self.cell.unwrap_or(0.0),
            "stop_reason": self.stop,
            "cardinality": self.attractor.len(),
        });
        serde_json::to_string_pretty(&value).expect("plain JSON object")
    }
}
