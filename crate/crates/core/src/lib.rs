//! Finite point-cloud engine for iterated function systems in b-metric spaces.
//!
//! The crate models compact sets as finite, deduplicated point clouds and
//! provides three layers on top of them:
//!
//! * [`metric`] — b-metrics (euclidean, absolute difference, snowflake
//!   powers), the `F`-generator family used in contraction estimates, and
//!   gap functions `τ`, together with samplers that check their defining
//!   axioms numerically.
//! * [`compact`] — point-set algebra: unions, diameters, grid decimation,
//!   and the Pompeiu–Hausdorff distance with both a brute-force and a
//!   grid-accelerated evaluator that agree bit-for-bit on supported metrics.
//! * [`hutchinson`] — affine map systems, the set-valued union operator
//!   `T(A) = f₁(A) ∪ … ∪ f_N(A)`, fixed-point iteration towards the
//!   attractor, contraction certificates, and a chaos-game sampler.
//! * [`harness`] — randomized suites that exercise the metric-space lemmas
//!   and convergence guarantees end to end, plus a box-counting dimension
//!   estimator.
//!
//! All operations are pure: nothing mutates its inputs, results depend only
//! on arguments (random suites take explicit seeds), and evaluation order is
//! fixed so repeated runs produce identical bytes.

pub mod compact;
pub mod error;
pub mod harness;
pub mod hutchinson;
pub mod metric;
pub mod sample;


pub use compact::{hausdorff, hausdorff_accelerated, hausdorff_auto, HausdorffValue, PointSet};
pub use error::Error;
pub use harness::{SuiteReport, SuiteSpec};
pub use hutchinson::{AffineMap, AttractorResult, IfsSystem, IterateParams, IterationTrace};
pub use metric::{BMetric, FGenerator, FKind, Point, TauGenerator};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance for equality of exact quantities (distances that are
/// reproduced through two independent evaluation routes, conserved maxima,
/// dyadic arithmetic, …).
pub const EQ_TOL: f64 = 1e-12;

/// Slack threshold below which a sampled inequality counts as violated.
///
/// Inequalities are recorded as `slack = rhs - lhs`; floating-point noise may
/// push an honestly-true inequality a few ulps negative, so only
/// `slack < -SLACK_TOL` is reported as a violation.
pub const SLACK_TOL: f64 = 1e-9;
