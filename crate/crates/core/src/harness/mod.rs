//! Randomized verification suites over the set-distance and iteration
//! machinery, plus a box-counting dimension estimator for attractor sanity.
//!
//! Each suite draws its instances from a per-case seed
//! (`spec.seed + case index`), so any recorded failure can be replayed in
//! isolation by constructing the same case again. Reports serialize to JSON
//! as `{suite, cases, failures: [{seed, detail, lhs, rhs, slack}], ms}` and
//! the `verify` command exits nonzero iff any suite reports a failure.
//!
//! Tolerance policy: bounds that are pure order statements over shared
//! distance evaluations (subset monotonicity, union maxima) are checked
//! exactly; bounds whose two sides go through different floating-point
//! arithmetic use `slack < -1e-9` as the violation threshold, recording the
//! signed slack either way.

mod boxdim;
mod sampling;

pub use boxdim::{box_dimension, DimensionEstimate};
pub use sampling::{random_point_set, random_subset};

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compact::{
    decimation_displacement, directed_distance, hausdorff_auto, nearest_in, point_to_set, PointSet,
};
use crate::error::Error;
use crate::hutchinson::{IfsSystem, IterateParams, StopReason};
use crate::metric::BMetric;
use crate::sample::{SampleSpec, DEFAULT_SEED};
use crate::{Result, EQ_TOL, SLACK_TOL};

/// One failed check. `seed` is the case seed that reproduces the instance.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub detail: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Outcome of one verification suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub ms: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite reports are plain data")
    }
}

/// Case count and base seed for a randomized suite. Case `i` runs with seed
/// `seed.wrapping_add(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteSpec {
    pub cases: usize,
    pub seed: u64,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec { cases: 1000, seed: DEFAULT_SEED }
    }
}

impl SuiteSpec {
    pub fn with_cases(cases: usize) -> Self {
        SuiteSpec { cases, ..SuiteSpec::default() }
    }

    fn case_rng(&self, case: usize) -> (u64, ChaCha8Rng) {
        let seed = self.seed.wrapping_add(case as u64);
        (seed, ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Record `lhs ≤ rhs + tol` (signed slack `rhs − lhs`), pushing a failure on
/// violation. The detail closure only runs when the check fails.
fn check_le(
    failures: &mut Vec<Failure>,
    seed: u64,
    tol: f64,
    lhs: f64,
    rhs: f64,
    detail: impl FnOnce() -> String,
) {
    let slack = rhs - lhs;
    // Negated so a NaN slack registers as a failure instead of a pass.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(slack >= -tol) {
        failures.push(Failure { seed, detail: detail(), lhs, rhs, slack });
    }
}

fn finish(suite: &'static str, cases: usize, failures: Vec<Failure>, t0: Instant) -> SuiteReport {
    SuiteReport { suite, cases, failures, ms: t0.elapsed().as_secs_f64() * 1e3 }
}

/// Monotonicity and union laws of the directed distance and of `H`:
///
/// 1. if `B ⊆ C` then `sup_{a∈A} d(a,C) ≤ sup_{a∈A} d(a,B)` — exact, both
///    sides take minima over shared evaluations;
/// 2. `sup_{x∈A∪B} d(x,C) = max{sup_A d(·,C), sup_B d(·,C)}` — exact;
/// 3. `H(A∪B, C∪D) ≤ max{H(A,C), H(B,D)}` within `1e-12`.
pub fn run_lemma14_suite(metric: &BMetric, dim: usize, spec: &SuiteSpec) -> Result<SuiteReport> {
    preflight(metric, dim)?;
    let t0 = Instant::now();
    let mut failures = Vec::new();

    for case in 0..spec.cases {
        let (seed, mut rng) = spec.case_rng(case);
        let c = random_point_set(&mut rng, dim, 50, -10.0, 10.0);
        let b = random_subset(&mut rng, &c);
        let a = random_point_set(&mut rng, dim, 50, -10.0, 10.0);

        let (to_c, _) = directed_distance(&a, &c, metric)?;
        let (to_b, _) = directed_distance(&a, &b, metric)?;
        check_le(&mut failures, seed, 0.0, to_c, to_b, || {
            format!("nested sets: sup d(A,C) exceeds sup d(A,B) with B ⊆ C (|A|={}, |B|={}, |C|={})", a.len(), b.len(), c.len())
        });

        let d = random_point_set(&mut rng, dim, 50, -10.0, 10.0);
        let union_ab = a.union(&b)?;
        let (joint, _) = directed_distance(&union_ab, &c, metric)?;
        let split = to_c.max(directed_distance(&b, &c, metric)?.0);
        if joint != split {
            failures.push(Failure {
                seed,
                detail: "union sup: sup over A∪B differs from max of partial sups".into(),
                lhs: joint,
                rhs: split,
                slack: split - joint,
            });
        }

        let h_union = hausdorff_auto(&union_ab, &c.union(&d)?, metric)?.value;
        let h_parts = hausdorff_auto(&a, &c, metric)?.value.max(hausdorff_auto(&b, &d, metric)?.value);
        check_le(&mut failures, seed, EQ_TOL, h_union, h_parts, || {
            "union bound: H(A∪B, C∪D) exceeds max{H(A,C), H(B,D)}".into()
        });
    }

    Ok(finish("lemma14", spec.cases, failures, t0))
}

/// Pointwise facts relating `d`, the directed distance, and `H`:
///
/// 1. `d(x,B) ≤ H(A,B)` for every `x ∈ A` — exact;
/// 2. the nearest point of `B` attains `d(a,B)`, and that value is within
///    `H(A,B)` — exact;
/// 3. `d(x,A) ≤ b·(d(x,y) + d(y,A))` for random `x, y` — slack `1e-9`;
/// 4. `d(x,A) = 0` iff `x ∈ A`: zero for a member, positive for a point
///    pushed strictly outside the bounding box;
/// 5. the chain bound `d(x₁,x_L) ≤ Σ wⱼ·d(xⱼ,xⱼ₊₁)` with weights
///    `b, b², …, b^{L−2}, b^{L−2}` — slack `1e-9`.
pub fn run_lemma15_suite(metric: &BMetric, dim: usize, spec: &SuiteSpec) -> Result<SuiteReport> {
    preflight(metric, dim)?;
    let t0 = Instant::now();
    let bee = metric.b();
    let mut failures = Vec::new();

    for case in 0..spec.cases {
        let (seed, mut rng) = spec.case_rng(case);
        let a = random_point_set(&mut rng, dim, 50, -10.0, 10.0);
        let b = random_point_set(&mut rng, dim, 50, -10.0, 10.0);
        let h = hausdorff_auto(&a, &b, metric)?.value;

        for (i, x) in a.iter().enumerate() {
            check_le(&mut failures, seed, 0.0, point_to_set(x, &b, metric)?, h, || {
                format!("membership bound: d(a_{i},B) exceeds H(A,B)")
            });

            let (j, attained) = nearest_in(x, &b, metric);
            let recomputed = metric.eval(x, b.point(j))?;
            if recomputed != attained {
                failures.push(Failure {
                    seed,
                    detail: format!("nearest point: witness b_{j} does not attain d(a_{i},B)"),
                    lhs: recomputed,
                    rhs: attained,
                    slack: attained - recomputed,
                });
            }
            check_le(&mut failures, seed, 0.0, attained, h, || {
                format!("nearest point: d(a_{i},B) exceeds H(A,B)")
            });
        }

        let x = sampling_point(&mut rng, dim);
        let y = sampling_point(&mut rng, dim);
        let lhs = point_to_set(&x, &a, metric)?;
        let rhs = bee * (metric.eval(&x, &y)? + point_to_set(&y, &a, metric)?);
        check_le(&mut failures, seed, SLACK_TOL, lhs, rhs, || {
            format!("relaxed triangle through a set fails with b={bee}")
        });

        let member = point_to_set(a.point(0), &a, metric)?;
        if member != 0.0 {
            failures.push(Failure {
                seed,
                detail: "zero distance: a member of A has d(x,A) ≠ 0".into(),
                lhs: member,
                rhs: 0.0,
                slack: -member,
            });
        }
        let (_, hi) = a.bounding_box();
        let outside: Vec<f64> = hi.iter().map(|&c| c + 1.0).collect();
        let out_dist = point_to_set(&outside, &a, metric)?;
        // Negated so a NaN distance registers as a failure instead of a pass.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(out_dist > 0.0) {
            failures.push(Failure {
                seed,
                detail: "zero distance: a point outside the bounding box has d(x,A) = 0".into(),
                lhs: out_dist,
                rhs: 0.0,
                slack: -1.0,
            });
        }

        let len = rng.random_range(3..=6usize);
        let chain: Vec<Vec<f64>> = (0..len).map(|_| sampling_point(&mut rng, dim)).collect();
        let lhs = metric.eval(&chain[0], &chain[len - 1])?;
        let mut rhs = 0.0;
        for j in 0..len - 1 {
            let weight = bee.powi((j + 1).min(len - 2) as i32);
            rhs += weight * metric.eval(&chain[j], &chain[j + 1])?;
        }
        check_le(&mut failures, seed, SLACK_TOL, lhs, rhs, || {
            format!("chain of {len} points breaks the b-weighted bound with b={bee}")
        });
    }

    Ok(finish("lemma15", spec.cases, failures, t0))
}

/// Set-level strict contraction of each map, `H(f(A), f(B)) < H(A,B)`, plus
/// its transfer through the strictly increasing generator,
/// `F(H(f(A),f(B))) < F(H(A,B))`, on random pairs with `H(A,B) > 0`.
///
/// Before sampling, every map is certified pointwise contractive on 256
/// pairs; a map that fails turns into `precondition:` failure entries and
/// the suite reports zero cases instead of asserting set-level facts that
/// cannot hold.
pub fn run_lifted_contraction_suite(system: &IfsSystem, spec: &SuiteSpec) -> Result<SuiteReport> {
    let t0 = Instant::now();
    let metric = system.metric();
    let dim = system.dim();
    let mut failures = Vec::new();

    let precheck = SampleSpec { count: 256, seed: spec.seed, ..SampleSpec::default() };
    for idx in 0..system.maps().len() {
        let report = system.certify_pointwise(idx, &precheck)?;
        if !report.passed() {
            let worst = report
                .violations
                .iter()
                .min_by(|u, v| u.slack.total_cmp(&v.slack))
                .expect("a failed certificate has at least one violation");
            failures.push(Failure {
                seed: precheck.seed,
                detail: format!(
                    "precondition: map {idx} fails the pointwise contraction inequality on {} of {} samples ({})",
                    report.violations.len(),
                    report.samples,
                    worst.detail
                ),
                lhs: worst.lhs,
                rhs: worst.rhs,
                slack: worst.slack,
            });
        }
    }
    if !failures.is_empty() {
        return Ok(finish("lifted", 0, failures, t0));
    }

    let f = *system.f();
    for case in 0..spec.cases {
        let (seed, mut rng) = spec.case_rng(case);
        let a = random_point_set(&mut rng, dim, 50, -10.0, 10.0);
        let b = random_point_set(&mut rng, dim, 50, -10.0, 10.0);
        let h_ab = hausdorff_auto(&a, &b, metric)?.value;
        if h_ab <= 0.0 {
            continue;
        }
        for (idx, map) in system.maps().iter().enumerate() {
            let h_img = hausdorff_auto(&map.image(&a)?, &map.image(&b)?, metric)?.value;
            check_le(&mut failures, seed, SLACK_TOL, h_img, h_ab, || {
                format!("map {idx} expands a set pair: H(fA,fB) ≥ H(A,B)")
            });
            if h_img > 0.0 {
                check_le(&mut failures, seed, SLACK_TOL, f.eval(h_img)?, f.eval(h_ab)?, || {
                    format!("map {idx}: F(H(fA,fB)) ≥ F(H(A,B)) despite contraction")
                });
            }
        }
    }

    Ok(finish("lifted", spec.cases, failures, t0))
}

/// Drive [`IfsSystem::iterate`] from every seed set and check that
///
/// (a) each run converges (stop reason, not just a small final step);
/// (b) the *undecimated* step distances `H(Aₘ, Aₘ₊₁)` are non-increasing
///     along a short raw trajectory;
/// (c) all pairwise distances between the resulting attractors are within
///     `b·(2·tol + 2·reach)`, where `reach` is the decimation displacement
///     bound expressed in the system's metric.
pub fn run_convergence_suite(
    system: &IfsSystem,
    seeds: &[PointSet],
    params: &IterateParams,
) -> Result<SuiteReport> {
    if seeds.is_empty() {
        return Err(Error::EmptySample("convergence suite needs at least one seed set"));
    }
    let t0 = Instant::now();
    let metric = system.metric();
    let mut failures = Vec::new();
    let mut attractors = Vec::with_capacity(seeds.len());

    for (k, seed_set) in seeds.iter().enumerate() {
        let (result, trace) = system.iterate(seed_set, params)?;
        if result.stop != StopReason::Converged {
            let last = trace.steps.last().map_or(f64::INFINITY, |s| s.h_step);
            failures.push(Failure {
                seed: k as u64,
                detail: format!(
                    "seed {k}: stopped with `{}` after {} steps without reaching tol",
                    result.stop,
                    trace.steps.len()
                ),
                lhs: last,
                rhs: params.tol,
                slack: params.tol - last,
            });
        }
        attractors.push(result.attractor);

        let steps = raw_trajectory_steps(seed_set.len(), system.maps().len());
        if steps >= 2 {
            let traj = system.trajectory(seed_set, steps, None)?;
            let mut prev: Option<f64> = None;
            for (m, pair) in traj.windows(2).enumerate() {
                let h = hausdorff_auto(&pair[0], &pair[1], metric)?.value;
                if let Some(p) = prev {
                    check_le(&mut failures, k as u64, SLACK_TOL, h, p, || {
                        format!("seed {k}: raw step distance rises at step {m}")
                    });
                }
                prev = Some(h);
            }
        }
    }

    let reach = decimation_displacement(metric, system.dim(), params.cell.unwrap_or(0.0));
    let bound = metric.b() * (2.0 * params.tol + 2.0 * reach);
    for j in 0..attractors.len() {
        for k in j + 1..attractors.len() {
            let h = hausdorff_auto(&attractors[j], &attractors[k], metric)?.value;
            check_le(&mut failures, k as u64, EQ_TOL, h, bound, || {
                format!("attractors from seeds {j} and {k} disagree beyond the resolution bound")
            });
        }
    }

    Ok(finish("convergence", seeds.len(), failures, t0))
}

/// Longest raw trajectory (capped at 8 steps) whose final iterate stays
/// below 200k points, so the non-increase check never blows up on
/// multi-map systems.
fn raw_trajectory_steps(seed_len: usize, n_maps: usize) -> usize {
    const CAP: u128 = 200_000;
    let mut steps = 0;
    let mut card = seed_len as u128;
    while steps < 8 && card.saturating_mul(n_maps as u128) <= CAP {
        card = card.saturating_mul(n_maps as u128);
        steps += 1;
    }
    steps
}

fn preflight(metric: &BMetric, dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("suites need dimension ≥ 1".into()));
    }
    if let Some(n) = metric.required_dim() {
        if n != dim {
            return Err(Error::DimensionMismatch { expected: n, got: dim });
        }
    }
    Ok(())
}

fn sampling_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    crate::sample::random_point(rng, dim, -10.0, 10.0).coords().to_vec()
}
