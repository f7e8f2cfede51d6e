//! Gap functions `τ : (0, ∞) → (0, ∞)` and their admissibility check.
//!
//! The contraction estimates need a strictly positive gap that does not
//! collapse near zero: `lim inf_{t→0⁺} τ(t) > 0`. Constants qualify
//! trivially; user expressions are screened by evaluating them on a dyadic
//! grid descending to zero and on a coarse grid across the working range.
//! `τ(t) = t` is the canonical reject — positive everywhere, but its infimum
//! at zero vanishes.

use crate::error::Error;
use crate::metric::expr::Expr;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
enum TauKind {
    Constant(f64),
    Expr(Expr),
}

/// A gap function together with the floor its `lim inf` must clear.
#[derive(Clone, Debug, PartialEq)]
pub struct TauGenerator {
    kind: TauKind,
    liminf_floor: f64,
}

/// Default floor used when the caller does not supply one.
pub const DEFAULT_LIMINF_FLOOR: f64 = 1e-6;

impl TauGenerator {
    /// Constant gap `τ ≡ c` with `c > 0`; the floor is `c` itself.
    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite { what: "constant τ", value: c });
        }
        if c <= 0.0 {
            return Err(Error::NonPositive { what: "constant τ", value: c });
        }
        Ok(TauGenerator { kind: TauKind::Constant(c), liminf_floor: c })
    }

    /// Parse a gap expression in `t`. `liminf_floor` is the positive value
    /// the sampled infimum near zero must stay above; `None` uses
    /// [`DEFAULT_LIMINF_FLOOR`].
    pub fn from_expr(source: &str, liminf_floor: Option<f64>) -> Result<Self> {
        let floor = liminf_floor.unwrap_or(DEFAULT_LIMINF_FLOOR);
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::NonPositive { what: "liminf floor", value: floor });
        }
        Ok(TauGenerator { kind: TauKind::Expr(Expr::parse(source)?), liminf_floor: floor })
    }

    /// The constant value, when this gap is a constant.
    pub fn as_constant(&self) -> Option<f64> {
        match &self.kind {
            TauKind::Constant(c) => Some(*c),
            TauKind::Expr(_) => None,
        }
    }

    /// The expression source, when this gap is an expression.
    pub fn expr_source(&self) -> Option<&str> {
        match &self.kind {
            TauKind::Constant(_) => None,
            TauKind::Expr(e) => Some(e.source()),
        }
    }

    pub fn liminf_floor(&self) -> f64 {
        self.liminf_floor
    }

    /// Evaluate at `t ≥ 0`. Values are required to be finite but not
    /// positive — positivity is certified separately by [`check_liminf`],
    /// which reports *where* the gap fails rather than erroring mid-run.
    ///
    /// [`check_liminf`]: TauGenerator::check_liminf
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "τ argument must be finite and non-negative, got {t}"
            )));
        }
        let value = match &self.kind {
            TauKind::Constant(c) => *c,
            TauKind::Expr(e) => e.eval(t),
        };
        if !value.is_finite() {
            return Err(Error::Expr(format!("τ({t}) evaluated to {value}")));
        }
        Ok(value)
    }

    /// Sample positivity across the grid and the `lim inf` behaviour at
    /// zero: the dyadic minimum `min_k τ(2^-k)` must clear the floor.
    pub fn check_liminf(&self, grid: &TauGridSpec) -> TauLiminfReport {
        let mut min_dyadic = f64::INFINITY;
        let mut nonpositive = None;
        let mut non_finite = None;

        let mut probe = |t: f64, dyadic: bool, min_dyadic: &mut f64| {
            let value = match &self.kind {
                TauKind::Constant(c) => *c,
                TauKind::Expr(e) => e.eval(t),
            };
            if !value.is_finite() {
                if non_finite.is_none() {
                    non_finite = Some((t, value));
                }
                return;
            }
            if dyadic && value < *min_dyadic {
                *min_dyadic = value;
            }
            if value <= 0.0 && nonpositive.is_none() {
                nonpositive = Some((t, value));
            }
        };

        for k in 0..=grid.depth {
            probe(2f64.powi(-(k as i32)), true, &mut min_dyadic);
        }
        // The domain is the open half-line, so the range grid starts one
        // step in; behaviour towards zero is the dyadic grid's job.
        for j in 1..=grid.range_samples {
            let t = grid.range_max * (j as f64) / (grid.range_samples as f64);
            probe(t, false, &mut min_dyadic);
        }

        TauLiminfReport {
            floor: self.liminf_floor,
            min_dyadic,
            nonpositive,
            non_finite,
        }
    }
}

/// Probe layout for [`TauGenerator::check_liminf`].
#[derive(Clone, Copy, Debug)]
pub struct TauGridSpec {
    /// The dyadic grid runs `t = 2^0, 2^-1, …, 2^-depth`.
    pub depth: u32,
    /// Number of equispaced probes across `[0, range_max]`.
    pub range_samples: usize,
    pub range_max: f64,
}

impl Default for TauGridSpec {
    fn default() -> Self {
        TauGridSpec { depth: 40, range_samples: 64, range_max: 100.0 }
    }
}

/// Outcome of the gap admissibility check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TauLiminfReport {
    /// Floor the dyadic minimum must clear.
    pub floor: f64,
    /// `min_k τ(2^-k)` over the dyadic grid.
    pub min_dyadic: f64,
    /// First probe where `τ(t) ≤ 0`, as `(t, τ(t))`.
    pub nonpositive: Option<(f64, f64)>,
    /// First probe where `τ(t)` was NaN or infinite.
    pub non_finite: Option<(f64, f64)>,
}

impl TauLiminfReport {
    pub fn passed(&self) -> bool {
        self.nonpositive.is_none() && self.non_finite.is_none() && self.min_dyadic >= self.floor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gap_evaluates_everywhere() {
        let tau = TauGenerator::constant(0.1).unwrap();
        assert_eq!(tau.eval(0.0).unwrap(), 0.1);
        assert_eq!(tau.eval(123.45).unwrap(), 0.1);
        assert_eq!(tau.as_constant(), Some(0.1));
        assert!(tau.check_liminf(&TauGridSpec::default()).passed());
    }

    #[test]
    fn constant_gap_must_be_positive() {
        assert!(TauGenerator::constant(0.0).is_err());
        assert!(TauGenerator::constant(-0.5).is_err());
        assert!(TauGenerator::constant(f64::INFINITY).is_err());
    }

    #[test]
    fn bounded_away_expression_passes() {
        // 0.1 + t/(1+t): infimum 0.1 at t = 0, grows towards 1.1.
        let tau = TauGenerator::from_expr("0.1 + t / (1 + t)", None).unwrap();
        let report = tau.check_liminf(&TauGridSpec::default());
        assert!(report.passed(), "min_dyadic = {}", report.min_dyadic);
        assert!(report.min_dyadic >= 0.1);
        assert_eq!(tau.eval(1.0).unwrap(), 0.6);
    }

    /// The canonical inadmissible gap: positive for every t > 0 but
    /// vanishing in the limit. The dyadic minimum ends up at 2^-40, far
    /// below any reasonable floor.
    #[test]
    fn identity_gap_is_rejected() {
        let tau = TauGenerator::from_expr("t", None).unwrap();
        let report = tau.check_liminf(&TauGridSpec::default());
        assert!(!report.passed());
        assert!(report.min_dyadic < tau.liminf_floor());
        assert!(report.nonpositive.is_none(), "t is positive at every probed point");
    }

    #[test]
    fn negative_dip_is_caught_by_the_range_grid() {
        // 0.5 - t/40 crosses zero at t = 20, inside the default range.
        let tau = TauGenerator::from_expr("0.5 - t / 40", None).unwrap();
        let report = tau.check_liminf(&TauGridSpec::default());
        assert!(!report.passed());
        assert!(report.nonpositive.is_some());
    }

    /// A gap that blows up at zero is admissible — the infimum near zero is
    /// +∞, which certainly clears the floor — but evaluating it *at* the
    /// pole is still an error.
    #[test]
    fn unbounded_gap_is_admissible_but_guarded_at_the_pole() {
        let tau = TauGenerator::from_expr("1 / t", None).unwrap();
        let report = tau.check_liminf(&TauGridSpec::default());
        assert!(report.passed(), "lim inf at zero is +∞");
        assert!(tau.eval(0.0).is_err(), "direct evaluation at the pole errors");
    }

    #[test]
    fn eval_rejects_bad_arguments() {
        let tau = TauGenerator::constant(1.0).unwrap();
        assert!(tau.eval(-1.0).is_err());
        assert!(tau.eval(f64::NAN).is_err());
    }
}
