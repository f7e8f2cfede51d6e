//! Points, b-metrics, and numerical checks of the relaxed triangle
//! inequality.
//!
//! A *b-metric* behaves like a metric except that the triangle inequality
//! only holds up to a fixed relaxation constant `b ≥ 1`:
//!
//! ```text
//! d(x, y) ≤ b · (d(x, z) + d(z, y))
//! ```
//!
//! Raising an ordinary metric to a power `p > 1` (a "snowflake") produces a
//! genuine b-metric with `b = 2^(p-1)` that is not a metric, which is the
//! main reason the rest of the crate never assumes `b = 1`.

mod expr;
mod fgen;
mod tau;

pub use expr::Expr;
pub use fgen::{check_f_axioms_with, FAxiomReport, FGenerator, FGridSpec, FKind};
pub use tau::{TauGenerator, TauGridSpec, TauLiminfReport};

use std::fmt;

use crate::error::Error;
use crate::sample::SampleSpec;
use crate::{Result, EQ_TOL};

/// A point of `ℝⁿ` with finite coordinates.
///
/// Construction rejects NaN and infinities and normalizes `-0.0` to `+0.0`,
/// so coordinate equality, hashing, and text formatting are all consistent
/// with numeric equality.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point must have at least one coordinate".into()));
        }
        for &c in &coords {
            if !c.is_finite() {
                return Err(Error::NonFinite { what: "point coordinate", value: c });
            }
        }
        Ok(Point(coords.into_iter().map(normalize_zero).collect()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Map `-0.0` to `+0.0` and leave every other value untouched.
pub(crate) fn normalize_zero(c: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c
    }
}

/// The distance functions the engine understands.
///
/// `Euclidean` and `AbsDiff` are ordinary metrics (`b = 1`). `Snowflake`
/// raises a base metric to the power `p > 1`, giving a b-metric with
/// `b = 2^(p-1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum BMetric {
    /// `‖x − y‖₂` on `ℝⁿ`.
    Euclidean,
    /// `|x − y|` on `ℝ¹`.
    AbsDiff,
    /// `base(x, y)^p` with `p > 1`.
    Snowflake { base: Box<BMetric>, p: f64 },
}

impl BMetric {
    /// Snowflake of `base` with exponent `p > 1`. The base must itself be an
    /// ordinary metric (nesting snowflakes would just multiply exponents).
    pub fn snowflake(base: BMetric, p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite { what: "snowflake exponent p", value: p });
        }
        if p <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "snowflake exponent p must be > 1, got {p}"
            )));
        }
        if matches!(base, BMetric::Snowflake { .. }) {
            return Err(Error::InvalidParameter(
                "snowflake base must be an ordinary metric".into(),
            ));
        }
        Ok(BMetric::Snowflake { base: Box::new(base), p })
    }

    /// Relaxation constant of the triangle inequality: 1 for ordinary
    /// metrics, `2^(p-1)` for a snowflake of exponent `p`.
    pub fn b(&self) -> f64 {
        match self {
            BMetric::Euclidean | BMetric::AbsDiff => 1.0,
            BMetric::Snowflake { p, .. } => 2f64.powf(p - 1.0),
        }
    }

    /// Ambient dimension this metric insists on, if any (`AbsDiff` only
    /// makes sense on the line).
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            BMetric::AbsDiff => Some(1),
            BMetric::Euclidean => None,
            BMetric::Snowflake { base, .. } => base.required_dim(),
        }
    }

    /// Exponent `q` such that `d(x, y) = ‖x − y‖₂^q`, if this metric is a
    /// monotone power of the euclidean distance. The grid-accelerated
    /// Hausdorff path relies on this to prune by euclidean geometry while
    /// still returning exact metric values.
    pub fn euclidean_power(&self) -> Option<f64> {
        match self {
            BMetric::Euclidean | BMetric::AbsDiff => Some(1.0),
            BMetric::Snowflake { base, p } => base.euclidean_power().map(|q| q * p),
        }
    }

    /// Distance between two coordinate slices.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        if let Some(n) = self.required_dim() {
            if x.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: x.len() });
            }
        }
        Ok(self.eval_unchecked(x, y))
    }

    /// `eval` without the per-call shape checks; used by the inner loops of
    /// the distance evaluators after validating shapes once up front.
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            BMetric::Euclidean => euclidean(x, y),
            BMetric::AbsDiff => (x[0] - y[0]).abs(),
            BMetric::Snowflake { base, p } => base.eval_unchecked(x, y).powf(*p),
        }
    }
}

impl fmt::Display for BMetric {
    /// Writes `euclidean`, `abs-diff`, or `snowflake(p=…, base=…)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BMetric::Euclidean => write!(f, "euclidean"),
            BMetric::AbsDiff => write!(f, "abs-diff"),
            BMetric::Snowflake { base, p } => write!(f, "snowflake(p={p}, base={base})"),
        }
    }
}

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..x.len() {
        let d = x[i] - y[i];
        sum += d * d;
    }
    sum.sqrt()
}

/// One sampled triple `(x, z, y)` whose relaxed triangle inequality failed.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TripleViolation {
    pub x: Point,
    pub z: Point,
    pub y: Point,
    /// `d(x, y)`.
    pub lhs: f64,
    /// `b · (d(x, z) + d(z, y))`.
    pub rhs: f64,
    /// `d(x, y) / (d(x, z) + d(z, y))`; infinite if the denominator is zero
    /// while the left side is not.
    pub ratio: f64,
}

/// Outcome of sampling the relaxed triangle inequality.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BTriangleReport {
    /// Claimed relaxation constant of the metric under test.
    pub b: f64,
    /// Number of triples actually checked.
    pub triples: usize,
    /// Largest observed `d(x, y) / (d(x, z) + d(z, y))`. At most `b` when
    /// the metric is honest; how close it gets says how sharp `b` is.
    pub worst_ratio: f64,
    /// Triples exceeding `b` beyond tolerance, in discovery order.
    pub violations: Vec<TripleViolation>,
}

impl BTriangleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `d(x,y) ≤ b·(d(x,z) + d(z,y))` on random triples from the spec's
/// box. A triple fails when its ratio exceeds `b` by more than `1e-12`
/// relative tolerance.
pub fn check_b_triangle(metric: &BMetric, dim: usize, spec: &SampleSpec) -> Result<BTriangleReport> {
    if spec.count == 0 {
        return Err(Error::EmptySample("b-triangle check needs at least one triple"));
    }
    if let Some(n) = metric.required_dim() {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: dim });
        }
    }
    let mut rng = spec.rng();
    let triples: Vec<(Point, Point, Point)> = (0..spec.count)
        .map(|_| (spec.point(&mut rng, dim), spec.point(&mut rng, dim), spec.point(&mut rng, dim)))
        .collect();
    check_b_triangle_triples(metric, &triples)
}

/// Same check over caller-supplied triples `(x, z, y)`.
pub fn check_b_triangle_triples(
    metric: &BMetric,
    triples: &[(Point, Point, Point)],
) -> Result<BTriangleReport> {
    if triples.is_empty() {
        return Err(Error::EmptySample("b-triangle check needs at least one triple"));
    }
    let b = metric.b();
    let mut worst = 0.0_f64;
    let mut violations = Vec::new();
    for (x, z, y) in triples {
        let dxy = metric.eval(x, y)?;
        let dxz = metric.eval(x, z)?;
        let dzy = metric.eval(z, y)?;
        let denom = dxz + dzy;
        let ratio = if denom > 0.0 {
            dxy / denom
        } else if dxy > 0.0 {
            f64::INFINITY
        } else {
            // x = z = y for a faithful metric: the inequality is 0 ≤ 0.
            continue;
        };
        if ratio > worst {
            worst = ratio;
        }
        if ratio > b * (1.0 + EQ_TOL) {
            violations.push(TripleViolation {
                x: x.clone(),
                z: z.clone(),
                y: y.clone(),
                lhs: dxy,
                rhs: b * denom,
                ratio,
            });
        }
    }
    Ok(BTriangleReport { b, triples: triples.len(), worst_ratio: worst, violations })
}
