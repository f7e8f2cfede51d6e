//! Numerical certificates for the contraction inequalities a system claims.
//!
//! Three layers, from points to sets:
//!
//! * **Pointwise** — for sampled pairs `x ≠ y` and one map `f`, the gapped
//!   inequality `τ(d(x,y)) + F(d(fx,fy)) ≤ F(d(x,y))` whenever
//!   `d(fx,fy) > 0`. With a constant gap this is the classic constant-drop
//!   form (wire id `eq-1.1`), with a variable gap the general one
//!   (`eq-1.2`).
//! * **Set-level** — the same shape lifted to the union operator with the
//!   seven-term Ciric weight in place of `d(x,y)` (`eq-1.3`).
//! * **Closed corollary forms** — for the three non-`log` generators the
//!   pointwise inequality can be rearranged into an exponential-free…
//!   exponential-ful but `F`-free statement (`cor-2.5`, `cor-2.6`,
//!   `cor-2.7`). Each closed form is checked on its own *and* cross-checked
//!   verdict-for-verdict against the pointwise route on identical samples,
//!   so a bug in either rearrangement or generator evaluation shows up as a
//!   disagreement.
//!
//! A certificate never proves the inequality — it hunts for violations.
//! `slack = rhs − lhs` is recorded per sample and a sample fails only when
//! its slack drops below `−1e-9` ([`SLACK_TOL`]), keeping honest rounding
//! noise out of the violation list.

use crate::compact::{hausdorff_auto, PointSet};
use crate::error::Error;
use crate::metric::{FGenerator, FKind, Point};
use crate::sample::SampleSpec;
use crate::{Result, SLACK_TOL};

use super::IfsSystem;

/// Which inequality a report certifies. The wire names are the stable
/// tokens used by reports, suite selectors, and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityId {
    /// Pointwise with constant gap (`eq-1.1`).
    PointwiseConstantGap,
    /// Pointwise with variable gap (`eq-1.2`).
    PointwiseVariableGap,
    /// Set-level Ciric form (`eq-1.3`).
    SetLevel,
    /// Closed form for `F(α) = ln α + α` (`cor-2.5`).
    ClosedLogLinear,
    /// Closed form for `F(α) = ln(α² + α) + α` (`cor-2.6`).
    ClosedLogQuadratic,
    /// Closed form for `F(α) = −1/√α` (`cor-2.7`).
    ClosedInverseSqrt,
}

impl InequalityId {
    pub fn wire(self) -> &'static str {
        match self {
            InequalityId::PointwiseConstantGap => "eq-1.1",
            InequalityId::PointwiseVariableGap => "eq-1.2",
            InequalityId::SetLevel => "eq-1.3",
            InequalityId::ClosedLogLinear => "cor-2.5",
            InequalityId::ClosedLogQuadratic => "cor-2.6",
            InequalityId::ClosedInverseSqrt => "cor-2.7",
        }
    }
}

impl std::fmt::Display for InequalityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.wire())
    }
}

impl serde::Serialize for InequalityId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.wire())
    }
}

/// The three closed corollary forms and the generator each one encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorollaryForm {
    /// `a·e^(a−t) ≤ e^(−τ(t))·t` ⟺ pointwise with `F(α) = ln α + α`.
    LogLinear,
    /// `a(a+1)·e^(a−t) ≤ e^(−τ(t))·t(t+1)` ⟺ pointwise with
    /// `F(α) = ln(α²+α) + α`.
    LogQuadratic,
    /// `a ≤ t / (1 + τ(t)·√t)²` ⟺ pointwise with `F(α) = −1/√α`.
    InverseSqrt,
}

impl CorollaryForm {
    pub const ALL: [CorollaryForm; 3] =
        [CorollaryForm::LogLinear, CorollaryForm::LogQuadratic, CorollaryForm::InverseSqrt];

    /// The generator whose pointwise inequality this form rearranges.
    pub fn f_kind(self) -> FKind {
        match self {
            CorollaryForm::LogLinear => FKind::LogPlusLinear,
            CorollaryForm::LogQuadratic => FKind::LogQuadratic,
            CorollaryForm::InverseSqrt => FKind::InverseSqrt,
        }
    }

    pub fn id(self) -> InequalityId {
        match self {
            CorollaryForm::LogLinear => InequalityId::ClosedLogLinear,
            CorollaryForm::LogQuadratic => InequalityId::ClosedLogQuadratic,
            CorollaryForm::InverseSqrt => InequalityId::ClosedInverseSqrt,
        }
    }

    /// `(lhs, rhs)` of the closed form at contracted distance `a`, original
    /// distance `t > 0`, gap `tau`; the form holds when `lhs ≤ rhs`.
    fn closed_sides(self, a: f64, t: f64, tau: f64) -> (f64, f64) {
        match self {
            CorollaryForm::LogLinear => (a * (a - t).exp(), (-tau).exp() * t),
            CorollaryForm::LogQuadratic => {
                (a * (a + 1.0) * (a - t).exp(), (-tau).exp() * t * (t + 1.0))
            }
            CorollaryForm::InverseSqrt => {
                let denom = 1.0 + tau * t.sqrt();
                (a, t / (denom * denom))
            }
        }
    }

    /// `rhs − lhs` of [`closed_sides`](CorollaryForm::closed_sides).
    #[cfg(test)]
    fn closed_slack(self, a: f64, t: f64, tau: f64) -> f64 {
        let (lhs, rhs) = self.closed_sides(a, t, tau);
        rhs - lhs
    }
}

/// One sample whose inequality failed.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Violation {
    /// Index of the sample (or trajectory pair) inside its certificate run.
    pub index: usize,
    /// Human-readable description of the witness.
    pub detail: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative beyond tolerance by construction.
    pub slack: f64,
}

/// A sample where the closed corollary form and the pointwise route
/// returned different verdicts.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CrossCheck {
    pub index: usize,
    pub detail: String,
    /// Slack of the closed form (its own scale).
    pub closed_slack: f64,
    /// Slack of the pointwise route (`F`-scale).
    pub pointwise_slack: f64,
}

/// Outcome of one certificate run.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CertificateReport {
    pub inequality: InequalityId,
    /// Samples actually tested (inequality non-vacuous).
    pub samples: usize,
    /// Samples skipped because the guard `d(fx,fy) > 0` (or its set-level
    /// analogue) failed.
    pub skipped: usize,
    pub violations: Vec<Violation>,
    /// Smallest slack seen over tested samples; `+∞` when none was tested.
    pub min_slack: f64,
    /// Verdict mismatches between routes; only populated by the corollary
    /// certificates.
    pub disagreements: Vec<CrossCheck>,
}

impl CertificateReport {
    /// No violations — the inequality survived this sample set.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// No route disagreements (trivially true outside corollary runs).
    pub fn consistent(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Draw the sample pairs a pointwise certificate uses. Shared by the
/// pointwise and corollary certificates so that "identical spec" means
/// "identical pairs", which is what makes their verdicts comparable
/// sample-for-sample.
pub fn sample_pairs(spec: &SampleSpec, dim: usize) -> Vec<(Point, Point)> {
    let mut rng = spec.rng();
    (0..spec.count)
        .map(|_| (spec.point(&mut rng, dim), spec.point(&mut rng, dim)))
        .collect()
}

/// `slack` of the pointwise inequality for one map and one pair, or `None`
/// when the guard `d(fx,fy) > 0` makes it vacuous. Also returns `(lhs,
/// rhs)` for reporting.
fn pointwise_slack(
    sys: &IfsSystem,
    map_idx: usize,
    f: &FGenerator,
    x: &Point,
    y: &Point,
) -> Result<Option<(f64, f64, f64)>> {
    let map = &sys.maps()[map_idx];
    let fx = map.apply(x);
    let fy = map.apply(y);
    let a = sys.metric().eval(&fx, &fy)?;
    if a <= 0.0 {
        return Ok(None);
    }
    let t = sys.metric().eval(x, y)?;
    debug_assert!(t > 0.0, "d(fx,fy) > 0 forces x ≠ y");
    let lhs = sys.tau().eval(t)? + f.eval(a)?;
    let rhs = f.eval(t)?;
    Ok(Some((lhs, rhs, rhs - lhs)))
}

impl IfsSystem {
    /// Certify the pointwise inequality for map `map_idx` on sampled pairs.
    /// Reports under `eq-1.1` (constant gap) or `eq-1.2` (variable gap).
    pub fn certify_pointwise(
        &self,
        map_idx: usize,
        spec: &SampleSpec,
    ) -> Result<CertificateReport> {
        if map_idx >= self.maps().len() {
            return Err(Error::InvalidParameter(format!(
                "map index {map_idx} out of range (system has {} maps)",
                self.maps().len()
            )));
        }
        if spec.count == 0 {
            return Err(Error::EmptySample("pointwise certificate needs at least one pair"));
        }
        let id = if self.tau().as_constant().is_some() {
            InequalityId::PointwiseConstantGap
        } else {
            InequalityId::PointwiseVariableGap
        };
        let f = *self.f();
        let mut report = empty_report(id);
        for (i, (x, y)) in sample_pairs(spec, self.dim()).iter().enumerate() {
            match pointwise_slack(self, map_idx, &f, x, y)? {
                None => report.skipped += 1,
                Some((lhs, rhs, slack)) => {
                    report.samples += 1;
                    report.min_slack = report.min_slack.min(slack);
                    if slack < -SLACK_TOL {
                        report.violations.push(Violation {
                            index: i,
                            detail: format!("map {map_idx}: x={x}, y={y}"),
                            lhs,
                            rhs,
                            slack,
                        });
                    }
                }
            }
        }
        Ok(report)
    }

    /// The seven-term set weight of the Ciric form:
    ///
    /// ```text
    /// M(A,B) = max{ H(A,B), H(A,TA), H(B,TB), [H(A,TB)+H(B,TA)]/(2b),
    ///               H(T²A,TA), H(T²A,B), H(T²A,TB) }
    /// ```
    pub fn ciric_weight(&self, a: &PointSet, b: &PointSet) -> Result<CiricWeight> {
        let ta = self.step(a)?;
        let tb = self.step(b)?;
        let t2a = self.step(&ta)?;
        let h = |x: &PointSet, y: &PointSet| -> Result<f64> {
            Ok(hausdorff_auto(x, y, self.metric())?.value)
        };
        let w = CiricWeight {
            h_ab: h(a, b)?,
            h_a_ta: h(a, &ta)?,
            h_b_tb: h(b, &tb)?,
            cross_avg: (h(a, &tb)? + h(b, &ta)?) / (2.0 * self.metric().b()),
            h_t2a_ta: h(&t2a, &ta)?,
            h_t2a_b: h(&t2a, b)?,
            h_t2a_tb: h(&t2a, &tb)?,
        };
        Ok(w)
    }

    /// Certify the set-level inequality
    /// `τ(M(A,B)) + F(H(TA,TB)) ≤ F(M(A,B))` on the given pairs, skipping
    /// pairs with `H(TA,TB) = 0`. Pair sizes are the caller's problem —
    /// cost grows with the product of cardinalities.
    pub fn certify_set_level(
        &self,
        pairs: &[(PointSet, PointSet)],
    ) -> Result<CertificateReport> {
        if pairs.is_empty() {
            return Err(Error::EmptySample("set-level certificate needs at least one pair"));
        }
        let mut report = empty_report(InequalityId::SetLevel);
        for (i, (a, b)) in pairs.iter().enumerate() {
            let ta = self.step(a)?;
            let tb = self.step(b)?;
            let h_images = hausdorff_auto(&ta, &tb, self.metric())?.value;
            if h_images <= 0.0 {
                report.skipped += 1;
                continue;
            }
            let weight = self.ciric_weight(a, b)?;
            // H(TA,TB) > 0 forces A ≠ B, so H(A,B) > 0 and the weight is a
            // valid F argument.
            let m_val = weight.value();
            let lhs = self.tau().eval(m_val)? + self.f().eval(h_images)?;
            let rhs = self.f().eval(m_val)?;
            let slack = rhs - lhs;
            report.samples += 1;
            report.min_slack = report.min_slack.min(slack);
            if slack < -SLACK_TOL {
                report.violations.push(Violation {
                    index: i,
                    detail: format!(
                        "pair {i}: |A|={}, |B|={}, H(TA,TB)={h_images}, M={m_val}",
                        a.len(),
                        b.len()
                    ),
                    lhs,
                    rhs,
                    slack,
                });
            }
        }
        Ok(report)
    }

    /// Certify one closed corollary form over all maps on sampled pairs,
    /// cross-checking each verdict against the pointwise route under the
    /// form's generator (same pairs, same gap).
    ///
    /// Violations list closed-form failures; `disagreements` list samples
    /// where exactly one route failed.
    pub fn certify_corollary(
        &self,
        form: CorollaryForm,
        spec: &SampleSpec,
    ) -> Result<CertificateReport> {
        if spec.count == 0 {
            return Err(Error::EmptySample("corollary certificate needs at least one pair"));
        }
        let f = FGenerator::with_default_h(form.f_kind());
        let pairs = sample_pairs(spec, self.dim());
        let mut report = empty_report(form.id());
        for map_idx in 0..self.maps().len() {
            for (i, (x, y)) in pairs.iter().enumerate() {
                let Some((_, _, p_slack)) = pointwise_slack(self, map_idx, &f, x, y)? else {
                    report.skipped += 1;
                    continue;
                };
                let map = &self.maps()[map_idx];
                let a = self.metric().eval(&map.apply(x), &map.apply(y))?;
                let t = self.metric().eval(x, y)?;
                let tau = self.tau().eval(t)?;
                let (c_lhs, c_rhs) = form.closed_sides(a, t, tau);
                let c_slack = c_rhs - c_lhs;

                report.samples += 1;
                report.min_slack = report.min_slack.min(c_slack);
                let closed_fails = c_slack < -SLACK_TOL;
                let pointwise_fails = p_slack < -SLACK_TOL;
                if closed_fails {
                    report.violations.push(Violation {
                        index: i,
                        detail: format!("map {map_idx}: x={x}, y={y}, a={a}, t={t}"),
                        lhs: c_lhs,
                        rhs: c_rhs,
                        slack: c_slack,
                    });
                }
                if closed_fails != pointwise_fails {
                    report.disagreements.push(CrossCheck {
                        index: i,
                        detail: format!(
                            "map {map_idx}: closed route {} but pointwise route {} (x={x}, y={y})",
                            verdict(closed_fails),
                            verdict(pointwise_fails)
                        ),
                        closed_slack: c_slack,
                        pointwise_slack: p_slack,
                    });
                }
            }
        }
        Ok(report)
    }
}

fn verdict(fails: bool) -> &'static str {
    if fails {
        "fails"
    } else {
        "holds"
    }
}

fn empty_report(id: InequalityId) -> CertificateReport {
    CertificateReport {
        inequality: id,
        samples: 0,
        skipped: 0,
        violations: Vec::new(),
        min_slack: f64::INFINITY,
        disagreements: Vec::new(),
    }
}

/// The seven constituent terms of the set weight, kept separate so reports
/// can say *which* term drove the maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CiricWeight {
    /// `H(A, B)`.
    pub h_ab: f64,
    /// `H(A, TA)`.
    pub h_a_ta: f64,
    /// `H(B, TB)`.
    pub h_b_tb: f64,
    /// `[H(A, TB) + H(B, TA)] / (2b)`.
    pub cross_avg: f64,
    /// `H(T²A, TA)`.
    pub h_t2a_ta: f64,
    /// `H(T²A, B)`.
    pub h_t2a_b: f64,
    /// `H(T²A, TB)`.
    pub h_t2a_tb: f64,
}

impl CiricWeight {
    pub fn terms(&self) -> [f64; 7] {
        [
            self.h_ab,
            self.h_a_ta,
            self.h_b_tb,
            self.cross_avg,
            self.h_t2a_ta,
            self.h_t2a_b,
            self.h_t2a_tb,
        ]
    }

    /// The weight itself: the maximum of the seven terms.
    pub fn value(&self) -> f64 {
        self.terms().iter().fold(f64::NEG_INFINITY, |acc, &t| acc.max(t))
    }
}
