//! The ambient homogeneous 3-spaces and their rotationally symmetric
//! coordinate model.
//!
//! A space is the pair (κ, τ) with κ ≠ 4τ²: base curvature κ of the
//! fibration base and bundle curvature τ ≥ 0. The coordinate model is all of
//! ℝ³ for κ ≥ 0 and the solid cylinder over a disk of radius 2/√(−κ) for
//! κ < 0. Profile curves of rotational surfaces live in the half plane
//! {y = 0, x > 0} carrying the metric
//!
//! ```text
//! dσ² = (1 + τ²x²) dx² + (4 + κx²)²/16 dz²
//! ```
//!
//! For κ > 0 the model misses one fiber (the antipodal fiber of the rotation
//! axis); trajectories with x → ∞ converge to it. For κ > 0, τ > 0 the space
//! is a Berger sphere and [`AmbientSpace::berger_embed`] maps model
//! coordinates onto the unit sphere of ℂ².

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for deciding that (κ, τ) sits on the space-form locus
/// κ = 4τ².
const SPACE_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("bundle curvature must satisfy tau >= 0, got {0}")]
    NegativeTau(f64),
    #[error("kappa = 4*tau^2 is a space form, not an E(kappa,tau) geometry (kappa = {kappa}, tau = {tau}); use AmbientSpace::space_form_limit if this limit is wanted as a test oracle")]
    SpaceForm { kappa: f64, tau: f64 },
    #[error("curvature parameters must be finite, got kappa = {kappa}, tau = {tau}")]
    NonFinite { kappa: f64, tau: f64 },
    #[error("x = {x} lies outside the model domain (0, {sup})")]
    OutsideDomain { x: f64, sup: f64 },
    #[error("operation requires a Berger sphere (kappa > 0 and tau > 0), got kappa = {kappa}, tau = {tau}")]
    NotBerger { kappa: f64, tau: f64 },
}

/// The pair (κ, τ) together with its coordinate-model bookkeeping.
///
/// `degenerate_ok` admits the space-form limits κ = 4τ² (notably κ = τ = 0,
/// Euclidean 3-space) purely as closed-form oracles for tests; classification
/// entry points reject such spaces unless the flag is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct AmbientSpace {
    kappa: f64,
    tau: f64,
    degenerate_ok: bool,
}

/// Serde-facing representation; `AmbientSpace` validates on construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawSpace {
    kappa: f64,
    tau: f64,
    #[serde(default)]
    degenerate_ok: bool,
}

impl TryFrom<RawSpace> for AmbientSpace {
    type Error = SpaceError;

    fn try_from(raw: RawSpace) -> Result<Self, SpaceError> {
        if raw.degenerate_ok {
            AmbientSpace::space_form_limit(raw.kappa, raw.tau)
        } else {
            AmbientSpace::new(raw.kappa, raw.tau)
        }
    }
}

impl From<AmbientSpace> for RawSpace {
    fn from(s: AmbientSpace) -> Self {
        RawSpace {
            kappa: s.kappa,
            tau: s.tau,
            degenerate_ok: s.degenerate_ok,
        }
    }
}

impl AmbientSpace {
    /// A proper E(κ, τ) space: τ ≥ 0 and κ ≠ 4τ².
    pub fn new(kappa: f64, tau: f64) -> Result<Self, SpaceError> {
        Self::build(kappa, tau, false)
    }

    /// Admits the space-form locus κ = 4τ² (flagged `degenerate_ok`), used for
    /// closed-form oracles such as the Euclidean Delaunay sphere.
    pub fn space_form_limit(kappa: f64, tau: f64) -> Result<Self, SpaceError> {
        Self::build(kappa, tau, true)
    }

    fn build(kappa: f64, tau: f64, degenerate_ok: bool) -> Result<Self, SpaceError> {
        if !kappa.is_finite() || !tau.is_finite() {
            return Err(SpaceError::NonFinite { kappa, tau });
        }
        if tau < 0.0 {
            return Err(SpaceError::NegativeTau(tau));
        }
        let space = AmbientSpace {
            kappa,
            tau,
            degenerate_ok,
        };
        if !degenerate_ok && space.is_space_form() {
            return Err(SpaceError::SpaceForm { kappa, tau });
        }
        Ok(space)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn degenerate_ok(&self) -> bool {
        self.degenerate_ok
    }

    /// True when (κ, τ) lies on the excluded locus κ = 4τ².
    pub fn is_space_form(&self) -> bool {
        let scale = 1.0f64.max(self.kappa.abs()).max(4.0 * self.tau * self.tau);
        (self.kappa - 4.0 * self.tau * self.tau).abs() <= SPACE_FORM_TOL * scale
    }

    /// Radius 2/√(−κ) of the model disk; defined only for κ < 0.
    pub fn wall_radius(&self) -> Option<f64> {
        (self.kappa < 0.0).then(|| 2.0 / (-self.kappa).sqrt())
    }

    /// Supremum of admissible x (wall radius for κ < 0, +∞ otherwise).
    pub fn x_sup(&self) -> f64 {
        self.wall_radius().unwrap_or(f64::INFINITY)
    }

    pub fn contains_x(&self, x: f64) -> bool {
        x > 0.0 && x < self.x_sup()
    }

    pub fn check_x(&self, x: f64) -> Result<(), SpaceError> {
        if self.contains_x(x) {
            Ok(())
        } else {
            Err(SpaceError::OutsideDomain {
                x,
                sup: self.x_sup(),
            })
        }
    }

    /// Profile-metric coefficients (g_xx, g_zz) = (1 + τ²x², (4 + κx²)²/16)
    /// at distance x from the axis.
    pub fn metric_coeffs(&self, x: f64) -> Result<(f64, f64), SpaceError> {
        self.check_x(x)?;
        let gxx = 1.0 + self.tau * self.tau * x * x;
        let q = 4.0 + self.kappa * x * x;
        Ok((gxx, q * q / 16.0))
    }

    /// Height identified with 0 in the Berger model: 8τπ/κ for κ > 0, τ > 0.
    pub fn vertical_period(&self) -> Option<f64> {
        (self.kappa > 0.0 && self.tau > 0.0)
            .then(|| 8.0 * self.tau * std::f64::consts::PI / self.kappa)
    }

    /// Height shift picked up by a profile curve passing through the pole of
    /// the antipodal fiber: 4πτ/κ (half the vertical period).
    pub fn pole_height_shift(&self) -> Option<f64> {
        self.vertical_period().map(|p| 0.5 * p)
    }

    /// Isometric embedding of a model point into the unit sphere of ℂ²,
    /// returned as (Re v, Im v, Re w, Im w). Requires a Berger sphere.
    ///
    /// The image is periodic in z with period 8τπ/κ.
    pub fn berger_embed(&self, p: [f64; 3]) -> Result<[f64; 4], SpaceError> {
        if self.kappa <= 0.0 || self.tau <= 0.0 {
            return Err(SpaceError::NotBerger {
                kappa: self.kappa,
                tau: self.tau,
            });
        }
        let [x, y, z] = p;
        let r2 = x * x + y * y;
        let norm = 1.0 / (1.0 + 0.25 * self.kappa * r2).sqrt();
        let phase = 0.25 * self.kappa * z / self.tau;
        let (sin_p, cos_p) = phase.sin_cos();
        let a = 0.5 * self.kappa.sqrt();
        // v = a (x + i y) e^{i phase} / sqrt(1 + kappa r^2 / 4), w = e^{i phase} / sqrt(...)
        let vx = a * (x * cos_p - y * sin_p) * norm;
        let vy = a * (x * sin_p + y * cos_p) * norm;
        let wx = cos_p * norm;
        let wy = sin_p * norm;
        Ok([vx, vy, wx, wy])
    }

    /// Default x budget for orbit integration: 50/√κ for κ > 0, 0.999 of the
    /// wall radius for κ < 0, and 10³ for κ = 0.
    pub fn default_x_max(&self) -> f64 {
        if self.kappa > 0.0 {
            50.0 / self.kappa.sqrt()
        } else if self.kappa < 0.0 {
            0.999 * self.wall_radius().unwrap()
        } else {
            1e3
        }
    }
}
