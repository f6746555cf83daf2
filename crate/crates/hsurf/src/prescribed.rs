//! Prescribed mean-curvature functions 𝔥 on the angle interval [−1, 1].
//!
//! All kinds are structurally even (only |y| is consumed), so 𝔥(y) = 𝔥(−y)
//! holds exactly by construction. Admissibility for a given ambient space —
//! positivity and 4𝔥(y)² + κ(1 − y²) > 0 — is a sampling-based check,
//! see [`PrescribedH::validate_c1`].

use crate::ambient::AmbientSpace;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inputs within this distance of ±1 are clamped; beyond it they are errors.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrescribedError {
    #[error("angle argument y = {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("table needs at least two knots covering [0, 1], got {0}")]
    TooFewKnots(usize),
    #[error(
        "table knots must be strictly increasing in |y| and span [0, 1]; offending abscissa {0}"
    )]
    BadKnots(f64),
    #[error("table values must be finite, got {0}")]
    NonFiniteValue(f64),
    #[error("step family requires H0 > 0, got {0}")]
    NonPositivePlateau(f64),
    #[error("step family requires lambda >= H0, got lambda = {lambda}, H0 = {h0}")]
    InnerBelowOuter { lambda: f64, h0: f64 },
    #[error("step family requires nu0 in (-1, 0), got {0}")]
    BadPlateauEdge(f64),
    #[error("step family transition bands do not fit: need nu0 - delta > -1 (nu0 = {nu0}, delta = {delta})")]
    BandsOutOfRange { nu0: f64, delta: f64 },
    #[error("step family requires delta > 0, got {0}")]
    NonPositiveDelta(f64),
}

/// Two-plateau family: outer value `h0` near ν = ±1, inner value `lambda`
/// on [ν₀, −ν₀], joined by C¹ monotone transition bands of width `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFamilySpec {
    pub h0: f64,
    pub lambda: f64,
    pub nu0: f64,
    pub delta: f64,
}

impl StepFamilySpec {
    pub fn validate(&self) -> Result<(), PrescribedError> {
        if !self.h0.is_finite() || self.h0 <= 0.0 {
            return Err(PrescribedError::NonPositivePlateau(self.h0));
        }
        if !self.lambda.is_finite() || self.lambda < self.h0 {
            return Err(PrescribedError::InnerBelowOuter {
                lambda: self.lambda,
                h0: self.h0,
            });
        }
        if !self.nu0.is_finite() || self.nu0 <= -1.0 || self.nu0 >= 0.0 {
            return Err(PrescribedError::BadPlateauEdge(self.nu0));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(PrescribedError::NonPositiveDelta(self.delta));
        }
        if self.nu0 - self.delta <= -1.0 {
            return Err(PrescribedError::BandsOutOfRange {
                nu0: self.nu0,
                delta: self.delta,
            });
        }
        Ok(())
    }
}

/// Exponent skewing the transition band toward the inner plateau edge.
///
/// The band profile drops from 1 to 0 across u ∈ [0, 1] with zero slope at
/// both ends (C¹ plateau matching) and stays strictly inside (0, 1) on the
/// open band. Most of the drop is concentrated near u = 0: the prescribed
/// function relaxes to near the outer plateau within a few percent of the
/// nominal bandwidth. A symmetric bridge does not work for the torus
/// construction: the profile arc must see outer-plateau curvature just
/// below the inner plateau edge, and its angle function only undershoots
/// that edge by an amount that shrinks as the inner plateau grows.
const BAND_SKEW: f64 = 100.0;

/// Weight of a full-width smoothstep mixed into the band so the profile
/// stays strictly between 0 and 1 in double precision across the whole open
/// band (the skewed part alone underflows to 0 past its cliff).
const BAND_FLOOR_MIX: f64 = 1e-6;

fn smoothstep(v: f64) -> f64 {
    v * v * (3.0 - 2.0 * v)
}

/// Descending C¹ band profile: smoothstep of (1 − u)^BAND_SKEW, floored by a
/// faint full-width smoothstep.
fn band_profile(u: f64) -> f64 {
    let v = (1.0 - u).powf(BAND_SKEW);
    (1.0 - BAND_FLOOR_MIX) * smoothstep(v) + BAND_FLOOR_MIX * smoothstep(1.0 - u)
}

fn band_profile_deriv(u: f64) -> f64 {
    let w = 1.0 - u;
    let v = w.powf(BAND_SKEW);
    let dv = -BAND_SKEW * w.powf(BAND_SKEW - 1.0);
    (1.0 - BAND_FLOOR_MIX) * 6.0 * v * (1.0 - v) * dv - BAND_FLOOR_MIX * 6.0 * w * (1.0 - w)
}

/// Fraction of the nominal bandwidth at which the band profile has dropped
/// to one half; the torus-search δ-condition is checked against this
/// effective depth.
pub fn band_half_width_fraction() -> f64 {
    1.0 - 0.5f64.powf(1.0 / BAND_SKEW)
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Constant(f64),
    /// c0 + c1·|y|; the symmetric derivative at 0 is taken to be 0.
    AngleLinear {
        c0: f64,
        c1: f64,
    },
    Table(MonotoneCubic),
    Step(StepFamilySpec),
}

/// An evaluatable even prescribed function with derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct PrescribedH {
    kind: Kind,
}

impl PrescribedH {
    pub fn constant(h0: f64) -> Self {
        PrescribedH {
            kind: Kind::Constant(h0),
        }
    }

    /// 𝔥(y) = c0 + c1·|y|.
    pub fn angle_linear(c0: f64, c1: f64) -> Self {
        PrescribedH {
            kind: Kind::AngleLinear { c0, c1 },
        }
    }

    /// Monotone C¹ interpolation of knots (t, 𝔥(t)) given for t = |y| ∈ [0, 1].
    ///
    /// Knots must be strictly increasing with first abscissa 0 and last 1.
    /// The slope at t = 0 is forced to 0 so the even extension is C¹ across
    /// the axis.
    pub fn table(knots: &[(f64, f64)]) -> Result<Self, PrescribedError> {
        Ok(PrescribedH {
            kind: Kind::Table(MonotoneCubic::new(knots)?),
        })
    }

    /// The two-plateau step family (transition bands realized by the cubic
    /// smoothstep t²(3 − 2t) rescaled to [H₀, λ]).
    pub fn step_family(spec: StepFamilySpec) -> Result<Self, PrescribedError> {
        spec.validate()?;
        Ok(PrescribedH {
            kind: Kind::Step(spec),
        })
    }

    /// 𝔥(y), range checked: |y| may exceed 1 by at most 1e−12.
    pub fn eval_h(&self, y: f64) -> Result<f64, PrescribedError> {
        let t = self.checked_abs(y)?;
        Ok(self.eval_abs(t))
    }

    /// 𝔥′(y), range checked. For every even 𝔥 the value at y = 0 is 0 (the
    /// symmetric derivative), and the derivative is one-sided-consistent at
    /// interior corners of table and angle-linear kinds.
    pub fn eval_dh(&self, y: f64) -> Result<f64, PrescribedError> {
        let t = self.checked_abs(y)?;
        if y == 0.0 {
            return Ok(0.0);
        }
        Ok(y.signum() * self.deriv_abs(t))
    }

    /// 𝔥 with the argument clamped into [−1, 1]; used on integrator hot paths
    /// where |ν| ≤ 1 holds up to roundoff.
    pub fn eval_clamped(&self, y: f64) -> f64 {
        self.eval_abs(y.abs().min(1.0))
    }

    /// 𝔥′ with the argument clamped into [−1, 1].
    pub fn eval_dh_clamped(&self, y: f64) -> f64 {
        if y == 0.0 {
            0.0
        } else {
            y.signum() * self.deriv_abs(y.abs().min(1.0))
        }
    }

    fn checked_abs(&self, y: f64) -> Result<f64, PrescribedError> {
        let t = y.abs();
        if t > 1.0 + RANGE_SLACK || !t.is_finite() {
            return Err(PrescribedError::OutOfRange(y));
        }
        Ok(t.min(1.0))
    }

    fn eval_abs(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant(h0) => *h0,
            Kind::AngleLinear { c0, c1 } => c0 + c1 * t,
            Kind::Table(spline) => spline.eval(t),
            Kind::Step(spec) => {
                let lo = -spec.nu0; // inner plateau edge in |y|
                let hi = lo + spec.delta;
                if t <= lo {
                    spec.lambda
                } else if t >= hi {
                    spec.h0
                } else {
                    let u = (t - lo) / spec.delta;
                    spec.h0 + (spec.lambda - spec.h0) * band_profile(u)
                }
            }
        }
    }

    fn deriv_abs(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant(_) => 0.0,
            Kind::AngleLinear { c1, .. } => *c1,
            Kind::Table(spline) => spline.deriv(t),
            Kind::Step(spec) => {
                let lo = -spec.nu0;
                let hi = lo + spec.delta;
                if t <= lo || t >= hi {
                    0.0
                } else {
                    let u = (t - lo) / spec.delta;
                    (spec.lambda - spec.h0) * band_profile_deriv(u) / spec.delta
                }
            }
        }
    }

    /// Smallest feature length in the angle variable (transition bandwidth
    /// for step families, minimal knot gap for tables). Integrators use it to
    /// cap step sizes so the order-5 error model stays honest across the
    /// derivative kinks.
    pub fn min_feature_scale(&self) -> Option<f64> {
        match &self.kind {
            Kind::Constant(_) | Kind::AngleLinear { .. } => None,
            Kind::Table(spline) => spline
                .ts
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(None, |acc: Option<f64>, g| {
                    Some(acc.map_or(g, |a| a.min(g)))
                }),
            Kind::Step(spec) => Some(spec.delta / BAND_SKEW),
        }
    }

    /// Samples positivity and 4𝔥² + κ(1 − y²) > 0 over a Chebyshev grid.
    /// Never fails; violations are listed in the report.
    pub fn validate_c1(&self, space: &AmbientSpace) -> ValidationReport {
        self.validate_c1_with(space, 4097)
    }

    pub fn validate_c1_with(&self, space: &AmbientSpace, samples: usize) -> ValidationReport {
        let n = samples.max(3);
        let kappa = space.kappa();
        let mut report = ValidationReport {
            passed: true,
            samples: n,
            min_positivity: Margin {
                y: f64::NAN,
                value: f64::INFINITY,
            },
            min_class_margin: Margin {
                y: f64::NAN,
                value: f64::INFINITY,
            },
            violations: Vec::new(),
        };
        for j in 0..n {
            let mut y = (j as f64 * std::f64::consts::PI / (n - 1) as f64).cos();
            // The midpoint of an odd Chebyshev grid is y = 0 exactly.
            if y.abs() < 1e-15 {
                y = 0.0;
            }
            let h = self.eval_abs(y.abs().min(1.0));
            if h < report.min_positivity.value {
                report.min_positivity = Margin { y, value: h };
            }
            let margin = 4.0 * h * h + kappa * (1.0 - y * y);
            if margin < report.min_class_margin.value {
                report.min_class_margin = Margin { y, value: margin };
            }
            if h <= 0.0 {
                report.violations.push(Violation {
                    y,
                    kind: ViolationKind::NonPositive,
                    margin: h,
                });
            }
            if margin <= 0.0 {
                report.violations.push(Violation {
                    y,
                    kind: ViolationKind::ClassBound,
                    margin,
                });
            }
        }
        report.passed = report.violations.is_empty();
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// 𝔥(y) ≤ 0
    NonPositive,
    /// 4𝔥(y)² + κ(1 − y²) ≤ 0
    ClassBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub y: f64,
    pub kind: ViolationKind,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub samples: usize,
    pub min_positivity: Margin,
    pub min_class_margin: Margin,
    pub violations: Vec<Violation>,
}

/// Shape-preserving cubic Hermite interpolant (Fritsch–Carlson slopes) over
/// strictly increasing abscissae spanning [0, 1].
#[derive(Debug, Clone, PartialEq)]
struct MonotoneCubic {
    ts: Vec<f64>,
    vs: Vec<f64>,
    ms: Vec<f64>,
}

impl MonotoneCubic {
    fn new(knots: &[(f64, f64)]) -> Result<Self, PrescribedError> {
        if knots.len() < 2 {
            return Err(PrescribedError::TooFewKnots(knots.len()));
        }
        let ts: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let vs: Vec<f64> = knots.iter().map(|k| k.1).collect();
        if ts[0] != 0.0 || *ts.last().unwrap() != 1.0 {
            return Err(PrescribedError::BadKnots(ts[0]));
        }
        for w in ts.windows(2) {
            if w[1] <= w[0] || w[1].is_nan() {
                return Err(PrescribedError::BadKnots(w[1]));
            }
        }
        for &v in &vs {
            if !v.is_finite() {
                return Err(PrescribedError::NonFiniteValue(v));
            }
        }

        let n = ts.len();
        let hseg: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (vs[i + 1] - vs[i]) / hseg[i]).collect();
        let mut ms = vec![0.0; n];

        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                ms[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * hseg[i] + hseg[i - 1];
                let w2 = hseg[i] + 2.0 * hseg[i - 1];
                ms[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // Right endpoint: one-sided estimate, clamped into the monotone box.
        let mut m_end = if n == 2 {
            d[0]
        } else {
            ((2.0 * hseg[n - 2] + hseg[n - 3]) * d[n - 2] - hseg[n - 2] * d[n - 3])
                / (hseg[n - 2] + hseg[n - 3])
        };
        if m_end * d[n - 2] <= 0.0 {
            m_end = 0.0;
        } else if m_end.abs() > 3.0 * d[n - 2].abs() {
            m_end = 3.0 * d[n - 2];
        }
        ms[n - 1] = m_end;
        // Left endpoint is the axis: slope 0 keeps the even extension C¹.
        ms[0] = 0.0;

        Ok(MonotoneCubic { ts, vs, ms })
    }

    fn segment(&self, t: f64) -> usize {
        match self
            .ts
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.ts.len() - 2),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let u = (t - self.ts[i]) / h;
        let (v0, v1, m0, m1) = (self.vs[i], self.vs[i + 1], self.ms[i], self.ms[i + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        v0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + h * m0 * (u3 - 2.0 * u2 + u)
            + v1 * (-2.0 * u3 + 3.0 * u2)
            + h * m1 * (u3 - u2)
    }

    fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let u = (t - self.ts[i]) / h;
        let (v0, v1, m0, m1) = (self.vs[i], self.vs[i + 1], self.ms[i], self.ms[i + 1]);
        let du = 1.0 / h;
        v0 * (6.0 * u * u - 6.0 * u) * du
            + m0 * (3.0 * u * u - 4.0 * u + 1.0)
            + v1 * (6.0 * u - 6.0 * u * u) * du
            + m1 * (3.0 * u * u - 2.0 * u)
    }
}
