//! Closed-form phase-plane geometry for the first-order profile system.
//!
//! The phase plane Θ_ε is {x > 0, y² < 1/(1 + τ²x²)} with coordinates
//! (distance to axis, angle function) and ε = sign(z′). This module evaluates
//! its closed-form furniture: the nullcline Γ_ε of y′, the equilibria e₀ and
//! e₋₁, the crossing parabolas p_κ/q_κ on the axis y = 0, and the
//! monotonicity-region classification. Everything here is algebra on
//! (κ, τ, 𝔥); orbit integration lives in [`crate::integrate`].

use crate::ambient::AmbientSpace;
use crate::prescribed::PrescribedH;
use serde::{Deserialize, Serialize};

/// Sign of z′ selecting the phase plane Θ₊₁ or Θ₋₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Eps {
    Plus,
    Minus,
}

impl Eps {
    pub fn sign(self) -> f64 {
        match self {
            Eps::Plus => 1.0,
            Eps::Minus => -1.0,
        }
    }

    pub fn from_sign(v: f64) -> Eps {
        if v >= 0.0 {
            Eps::Plus
        } else {
            Eps::Minus
        }
    }

    pub fn flip(self) -> Eps {
        match self {
            Eps::Plus => Eps::Minus,
            Eps::Minus => Eps::Plus,
        }
    }
}

/// A point of the phase plane together with its ε-sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub eps: Eps,
}

/// Interior test with a 1e−12 slack toward the interior: boundary contact is
/// an integrator event, not a phase-plane membership question.
pub fn is_interior(space: &AmbientSpace, x: f64, y: f64) -> bool {
    if !x.is_finite() || x <= 0.0 || x >= space.x_sup() * (1.0 - 1e-12) {
        return false;
    }
    let t = space.tau();
    y * y * (1.0 + t * t * x * x) < 1.0 - 1e-12
}

/// Constant orbit of the profile system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: f64,
    pub eps: Eps,
}

/// e₀ = 2/(√(4𝔥(0)² + κ) + 2𝔥(0)) in Θ₊₁ (always); e₋₁ with the opposite
/// sign in the denominator exists in Θ₋₁ only for κ > 0.
pub fn equilibrium(space: &AmbientSpace, h: &PrescribedH, eps: Eps) -> Option<Equilibrium> {
    let h0 = h.eval_clamped(0.0);
    let root = (4.0 * h0 * h0 + space.kappa()).sqrt();
    match eps {
        Eps::Plus => Some(Equilibrium {
            x: 2.0 / (root + 2.0 * h0),
            eps,
        }),
        Eps::Minus => (space.kappa() > 0.0).then(|| Equilibrium {
            x: 2.0 / (root - 2.0 * h0),
            eps,
        }),
    }
}

/// Value of the nullcline formula at y, ignoring whether the point lies in
/// Θ_ε. `None` when the formula itself is undefined (denominator ≤ 0).
///
/// Exposed because e.g. for κ < 0 the value Γ₋₁(0) exists yet lies beyond the
/// wall; tests compare it against closed forms.
pub fn raw_gamma_value(space: &AmbientSpace, h: &PrescribedH, eps: Eps, y: f64) -> Option<f64> {
    let (kappa, tau) = (space.kappa(), space.tau());
    let hy = h.eval_clamped(y);
    let one_m_y2 = 1.0 - y * y;
    // Denominator rewritten as a sum of squares,
    //   D = (√(4𝔥² + B) ± 2𝔥)² + 4τ²y²,  B = κ(1 − y²) + 4τ²y²,
    // with the ε = −1 difference evaluated through its conjugate; the naive
    // form cancels catastrophically near the Θ₋₁ asymptote.
    let b = kappa * one_m_y2 + 4.0 * tau * tau * y * y;
    let inner = 4.0 * hy * hy + b;
    if inner < 0.0 {
        return None;
    }
    let w = inner.sqrt();
    let root_term = match eps {
        Eps::Plus => w + 2.0 * hy,
        Eps::Minus => b / (w + 2.0 * hy),
    };
    let denom = root_term * root_term + 4.0 * tau * tau * y * y;
    if denom <= 0.0 {
        return None;
    }
    Some(2.0 * (one_m_y2.max(0.0) / denom).sqrt())
}

/// Γ_ε(y) where the point (Γ_ε(y), y) actually lies in the phase plane;
/// `None` when the curve is undefined or leaves Θ_ε at this height.
pub fn gamma_curve(space: &AmbientSpace, h: &PrescribedH, eps: Eps, y: f64) -> Option<f64> {
    let x = raw_gamma_value(space, h, eps, y)?;
    is_interior(space, x, y).then_some(x)
}

/// p_κ(x) = 4 − x(8𝔥(0) + κx): sign of y′ for a Θ₊₁ orbit crossing (x, 0).
pub fn crossing_parabola_plus(space: &AmbientSpace, h: &PrescribedH, x: f64) -> f64 {
    let h0 = h.eval_clamped(0.0);
    4.0 - x * (8.0 * h0 + space.kappa() * x)
}

/// q_κ(x) = 4 + x(8𝔥(0) − κx): the Θ₋₁ analogue.
pub fn crossing_parabola_minus(space: &AmbientSpace, h: &PrescribedH, x: f64) -> f64 {
    let h0 = h.eval_clamped(0.0);
    4.0 + x * (8.0 * h0 - space.kappa() * x)
}

/// Sign of y′ for the orbit crossing (x0, 0) in Θ_ε: +1 upward, −1 downward,
/// 0 exactly at the equilibrium.
pub fn y0_crossing_direction(space: &AmbientSpace, h: &PrescribedH, eps: Eps, x0: f64) -> i8 {
    let p = match eps {
        Eps::Plus => crossing_parabola_plus(space, h, x0),
        Eps::Minus => crossing_parabola_minus(space, h, x0),
    };
    let scale = 4.0 + 8.0 * h.eval_clamped(0.0).abs() * x0 + space.kappa().abs() * x0 * x0;
    if p.abs() <= 1e-14 * scale {
        0
    } else if p > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaSide {
    /// x < Γ_ε(y) (axis side).
    Left,
    /// x > Γ_ε(y).
    Right,
    OnCurve,
    /// Γ_ε(y) is undefined at this height; the whole x-range behaves like the
    /// axis side.
    Absent,
}

/// Monotonicity data of the orbit through a phase-plane point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionInfo {
    pub side: GammaSide,
    /// Sign of x′(s) = y.
    pub sign_dx: i8,
    /// Sign of y′(s): +1 on the axis side of Γ_ε, −1 beyond it, 0 on it.
    pub sign_dy: i8,
    /// Sign of the local graph slope dy/dx (`None` on y = 0 where the orbit
    /// crosses orthogonally).
    pub graph_slope: Option<i8>,
}

/// Classifies the monotonicity region containing an interior state.
pub fn region_classify(space: &AmbientSpace, h: &PrescribedH, state: &PhaseState) -> RegionInfo {
    let sign_dx = if state.y > 0.0 {
        1
    } else if state.y < 0.0 {
        -1
    } else {
        0
    };
    let (side, sign_dy) = match raw_gamma_value(space, h, state.eps, state.y) {
        None => (GammaSide::Absent, 1),
        Some(g) => {
            let tol = 1e-12 * g.max(1.0);
            if (state.x - g).abs() <= tol {
                (GammaSide::OnCurve, 0)
            } else if state.x > g {
                (GammaSide::Right, -1)
            } else {
                (GammaSide::Left, 1)
            }
        }
    };
    let graph_slope = (sign_dx != 0).then_some(sign_dy * sign_dx);
    RegionInfo {
        side,
        sign_dx,
        sign_dy,
        graph_slope,
    }
}
