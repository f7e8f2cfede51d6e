//! The `F`-generator family used on the right-hand side of contraction
//! estimates, together with numerical checks of its three defining axioms.
//!
//! A generator is a map `F : (0, ∞) → ℝ` that must be
//!
//! 1. strictly increasing,
//! 2. divergent at zero: `αₙ → 0` exactly when `F(αₙ) → −∞`, and
//! 3. tame near zero for some exponent `h ∈ (0, 1)`: `α^h · F(α) → 0`.
//!
//! The axioms cannot be proven by evaluation, but they can be falsified, and
//! the checks here are tuned so that each built-in generator passes with its
//! declared `h` while natural non-members (say `F ≡ 0`, which never
//! diverges) fail loudly.

use rand::Rng;

use crate::error::Error;
use crate::Result;

/// Built-in generators. `h` below refers to the exponent in axiom 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FKind {
    /// `F(α) = ln α`; `α^h ln α → 0` for any `h ∈ (0, 1)`.
    Log,
    /// `F(α) = ln α + α`.
    LogPlusLinear,
    /// `F(α) = ln(α² + α) + α`.
    LogQuadratic,
    /// `F(α) = −1/√α`; needs `h > 1/2`, so the default is `3/4`.
    InverseSqrt,
}

impl FKind {
    pub const ALL: [FKind; 4] = [
        FKind::Log,
        FKind::LogPlusLinear,
        FKind::LogQuadratic,
        FKind::InverseSqrt,
    ];

    /// A tameness exponent under which the generator passes axiom 3.
    pub fn default_h(self) -> f64 {
        match self {
            FKind::Log | FKind::LogPlusLinear | FKind::LogQuadratic => 0.5,
            // α^h·(−α^(−1/2)) = −α^(h−1/2) needs h > 1/2 to vanish.
            FKind::InverseSqrt => 0.75,
        }
    }

    /// Stable text name, used in configuration files and reports.
    pub fn name(self) -> &'static str {
        match self {
            FKind::Log => "log",
            FKind::LogPlusLinear => "log-plus-linear",
            FKind::LogQuadratic => "log-quadratic",
            FKind::InverseSqrt => "inverse-sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<FKind> {
        FKind::ALL.into_iter().find(|k| k.name() == name)
    }

    fn eval_raw(self, alpha: f64) -> f64 {
        match self {
            FKind::Log => alpha.ln(),
            FKind::LogPlusLinear => alpha.ln() + alpha,
            FKind::LogQuadratic => (alpha * alpha + alpha).ln() + alpha,
            FKind::InverseSqrt => -1.0 / alpha.sqrt(),
        }
    }
}

/// A generator together with the exponent `h` it claims for axiom 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FGenerator {
    kind: FKind,
    h: f64,
}

impl FGenerator {
    pub fn new(kind: FKind, h: f64) -> Result<Self> {
        if !(h.is_finite() && 0.0 < h && h < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tameness exponent h must lie in (0, 1), got {h}"
            )));
        }
        Ok(FGenerator { kind, h })
    }

    pub fn with_default_h(kind: FKind) -> Self {
        FGenerator { kind, h: kind.default_h() }
    }

    pub fn kind(&self) -> FKind {
        self.kind
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Evaluate at `α > 0`.
    pub fn eval(&self, alpha: f64) -> Result<f64> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite { what: "F argument", value: alpha });
        }
        if alpha <= 0.0 {
            return Err(Error::NonPositive { what: "F argument", value: alpha });
        }
        Ok(self.kind.eval_raw(alpha))
    }

    /// Run the axiom battery against this generator.
    pub fn check_axioms(&self, grid: &FGridSpec) -> FAxiomReport {
        check_f_axioms_with(|a| self.kind.eval_raw(a), self.h, grid)
    }
}

/// Where and how hard to probe the axioms.
#[derive(Clone, Copy, Debug)]
pub struct FGridSpec {
    /// Random ordered pairs for the monotonicity axiom.
    pub pairs: usize,
    pub seed: u64,
    /// Dyadic probe depth `N`; axioms 2 and 3 are evaluated at `α = 2^-N`.
    pub depth: u32,
    /// Axiom 2 passes when `F(2^-N) < -threshold`.
    pub f2_threshold: f64,
    /// Axiom 3 passes when `|(2^-N)^h · F(2^-N)| < tol`.
    pub f3_tol: f64,
}

impl Default for FGridSpec {
    fn default() -> Self {
        FGridSpec {
            pairs: 256,
            seed: crate::sample::DEFAULT_SEED,
            depth: 40,
            f2_threshold: 10.0,
            f3_tol: 1e-2,
        }
    }
}

/// Outcome of the axiom battery.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FAxiomReport {
    /// Axiom 1: every sampled pair `α < β` had `F(α) < F(β)`.
    pub monotone: bool,
    /// First offending pair `(α, β, F(α), F(β))`, if any.
    pub monotone_witness: Option<(f64, f64, f64, f64)>,
    /// Axiom 2: `F(2^-N)` fell below the divergence threshold.
    pub divergent_at_zero: bool,
    /// The probed value `F(2^-N)`.
    pub divergence_value: f64,
    /// Axiom 3: `(2^-N)^h · F(2^-N)` is small.
    pub tame_near_zero: bool,
    /// The probed value `(2^-N)^h · F(2^-N)`.
    pub tameness_value: f64,
    /// Exponent the tameness check used.
    pub h: f64,
}

impl FAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.monotone && self.divergent_at_zero && self.tame_near_zero
    }
}

/// Axiom battery for an arbitrary function, so that candidate generators can
/// be screened before being wrapped in [`FGenerator`].
///
/// Monotonicity is sampled on random pairs from `(0, 100]` plus the dyadic
/// ladder `2^0, 2^-1, …, 2^-depth`; divergence and tameness are read off at
/// the deepest dyadic point.
pub fn check_f_axioms_with(
    f: impl Fn(f64) -> f64,
    h: f64,
    grid: &FGridSpec,
) -> FAxiomReport {
    let mut rng = crate::sample::SampleSpec { seed: grid.seed, ..Default::default() }.rng();

    let mut monotone = true;
    let mut monotone_witness = None;
    let mut check_pair = |lo: f64, hi: f64| {
        let flo = f(lo);
        let fhi = f(hi);
        // Negated so a NaN value registers as a violation instead of a pass.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(flo < fhi) && monotone {
            monotone = false;
            monotone_witness = Some((lo, hi, flo, fhi));
        }
    };

    for _ in 0..grid.pairs {
        let a = rng.random_range(f64::MIN_POSITIVE..=100.0);
        let b = rng.random_range(f64::MIN_POSITIVE..=100.0);
        if a == b {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        check_pair(lo, hi);
    }
    for k in 0..grid.depth {
        // Adjacent rungs of the dyadic ladder, descending towards zero.
        check_pair(2f64.powi(-(k as i32) - 1), 2f64.powi(-(k as i32)));
    }

    let alpha = 2f64.powi(-(grid.depth as i32));
    let divergence_value = f(alpha);
    let tameness_value = alpha.powf(h) * divergence_value;

    FAxiomReport {
        monotone,
        monotone_witness,
        divergent_at_zero: divergence_value < -grid.f2_threshold,
        divergence_value,
        tame_near_zero: tameness_value.abs() < grid.f3_tol,
        tameness_value,
        h,
    }
}
