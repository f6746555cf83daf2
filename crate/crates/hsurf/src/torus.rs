//! Rotational tori in the κ ≤ 0, τ > 0 spaces: the height-gap functional
//! over a nodoid arc, the non-existence predicate for 𝔥 non-increasing on
//! [−1, 0], and the bisection over the two-plateau step family that locates
//! a closed profile.
//!
//! Along a nodoid arc with θ running monotonically from π/2 through π (the
//! Ω⁻ contact) to 3π/2, the height satisfies
//!
//! ```text
//! dz/dθ = 4 sin θ √(1 + τ²x²) / (8𝔥(ν) − (4 − κx²)/x · sin θ),
//! ```
//!
//! and the ascent/descent integrals I₂ = z(π) − z(π/2), I₁ = z(π) − z(3π/2)
//! are both positive. Their gap I₂ − I₁ equals the height mismatch of the
//! symmetric nodoid piece: the profile closes into a torus exactly when the
//! gap vanishes. The change of variables is valid only while θ′ > 0, which
//! the integration enforces (the denominator above carries the sign of θ′).

use crate::ambient::AmbientSpace;
use crate::classify::{check_inputs, ClassifyError, ClassifyOpts, NodoidInfo};
use crate::integrate::dopri5::{CoreError, Dopri5, FieldIssue, SolverConfig};
use crate::prescribed::{PrescribedError, PrescribedH, StepFamilySpec};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("torus machinery requires kappa <= 0 and tau > 0, got ({kappa}, {tau})")]
    Unsupported { kappa: f64, tau: f64 },
    #[error("arc left the theta-monotone regime near theta = {theta} (x = {x}); the seed is outside the admissible range")]
    ArcDegenerate { theta: f64, x: f64 },
    #[error("delta = {delta} too wide: reference arc only reaches nu_min = {nu_min} against nu0 = {nu0}")]
    DeltaTooWide { nu_min: f64, nu0: f64, delta: f64 },
    #[error("gap at the outer plateau is not positive (gap = {gap}); no bracketing possible")]
    NonPositiveBaseGap { gap: f64 },
    #[error("no sign change of the gap up to lambda = {lambda_max} (last gap {last_gap})")]
    NoCrossing { lambda_max: f64, last_gap: f64 },
    #[error("profile at lambda0 = {lambda0} did not close: residual {residual}")]
    ProfileNotClosed { lambda0: f64, residual: f64 },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Prescribed(#[from] PrescribedError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusOpts {
    pub base: ClassifyOpts,
    /// |gap| at which the λ-bisection stops.
    pub gap_tol: f64,
    /// Bracketing abandons at λ > lambda_max_factor · H₀.
    pub lambda_max_factor: f64,
}

impl Default for TorusOpts {
    fn default() -> Self {
        TorusOpts {
            base: ClassifyOpts::default(),
            gap_tol: 1e-9,
            lambda_max_factor: 1e3,
        }
    }
}

/// Heights of the descent/ascent legs of a nodoid arc and the gap between
/// them, with the angle and value of the ν minimum along the arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusGapResult {
    pub i1: f64,
    pub i2: f64,
    /// I₂ − I₁ = z(θ = 3π/2) − z(θ = π/2).
    pub gap: f64,
    pub theta_hat: f64,
    pub nu_min: f64,
    /// x at the Ω⁻ contact θ = π.
    pub omega_x: f64,
    pub seed_x: f64,
}

/// Evaluate the height integrals over the nodoid arc whose Ω⁻ contact sits
/// at x(θ = π) = `x1`.
///
/// The arc is pinned at its Ω radius, not at its seed: with x ≥ x₁ on the
/// whole ascent leg, the angle function there is confined to
/// (−1/√(1 + τ²x₁²), 0], which is what makes the two-plateau construction
/// bite. The outer seed x(θ = π/2) is found by an inner shooting loop
/// (monotone in the seed because orbits cannot cross).
pub fn torus_gap(
    space: &AmbientSpace,
    h: &PrescribedH,
    x1: f64,
    opts: &TorusOpts,
) -> Result<TorusGapResult, TorusError> {
    require_nil_or_sl2(space)?;
    check_inputs(space, h)?;
    let x_seed = shoot_omega_radius(space, h, x1, opts)?;
    torus_gap_from_seed(space, h, x_seed, opts)
}

/// x(θ = π) of the ascent leg seeded at x(θ = π/2) = x_seed.
fn ascent_x_at_pi(
    space: &AmbientSpace,
    h: &PrescribedH,
    x_seed: f64,
    opts: &TorusOpts,
) -> Result<f64, TorusError> {
    let rhs = |theta: f64, y: &[f64; 2]| -> Result<[f64; 2], FieldIssue> {
        theta_field(space, h, theta, y[0])
    };
    let cfg = theta_solver_config(h, opts);
    let mut solver =
        Dopri5::new(rhs, PI / 2.0, [x_seed, 0.0], cfg).map_err(|_| TorusError::ArcDegenerate {
            theta: PI / 2.0,
            x: x_seed,
        })?;
    while solver.s() < PI {
        solver.step_toward(PI).map_err(degenerate_from)?;
    }
    Ok(solver.y()[0])
}

/// Find the seed whose arc touches Ω at x₁. Bisection on the (monotone)
/// Ω radius as a function of the seed.
fn shoot_omega_radius(
    space: &AmbientSpace,
    h: &PrescribedH,
    x1: f64,
    opts: &TorusOpts,
) -> Result<f64, TorusError> {
    if !x1.is_finite() || !space.contains_x(x1) {
        return Err(TorusError::ArcDegenerate { theta: PI, x: x1 });
    }
    let h0 = h.eval_clamped(0.0);
    // Valid seeds are outer nodoid radii, i.e. above the sphere separatrix;
    // arcs hugging the sphere orbit have Ω radii near 0, so every x1 below
    // the seed is reachable.
    let r0 = crate::classify::shoot_sphere(space, h, &opts.base)?.r0;
    let mut lo = (x1 * (1.0 + 1e-9)).max(r0 * (1.0 + 1e-7));
    let m_lo = ascent_x_at_pi(space, h, lo, opts)? - x1;
    if m_lo >= 0.0 {
        // Already above target within the shooting tolerance.
        return Ok(lo);
    }
    // The x drop over the ascent is bounded by ~1/h(0) in these spaces;
    // expand in those units until the target is straddled.
    let step = 0.25 / h0.max(0.25);
    let mut hi = lo;
    let mut m_hi = m_lo;
    for _ in 0..64 {
        hi += step;
        if !space.contains_x(hi) {
            return Err(TorusError::ArcDegenerate { theta: PI, x: hi });
        }
        m_hi = ascent_x_at_pi(space, h, hi, opts)? - x1;
        if m_hi >= 0.0 {
            break;
        }
        lo = hi;
    }
    if m_hi < 0.0 {
        return Err(TorusError::ArcDegenerate { theta: PI, x: hi });
    }
    let tol = 1e-11 * x1.max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = ascent_x_at_pi(space, h, mid, opts)? - x1;
        if m.abs() < tol || (hi - lo) < 1e-15 * hi {
            return Ok(mid);
        }
        if m < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn theta_solver_config(h: &PrescribedH, opts: &TorusOpts) -> SolverConfig {
    let mut max_step = PI / 16.0;
    if let Some(f) = h.min_feature_scale() {
        max_step = max_step.min((f * 0.5).max(2e-4));
    }
    SolverConfig {
        rtol: opts.base.rtol,
        atol: opts.base.atol,
        max_step,
        max_steps: 2_000_000,
    }
}

fn degenerate_from(e: CoreError) -> TorusError {
    match e {
        CoreError::StepUnderflow { s, y, .. } => TorusError::ArcDegenerate { theta: s, x: y[0] },
        CoreError::MaxStepsExceeded { s } | CoreError::BadInitialState { s, .. } => {
            TorusError::ArcDegenerate {
                theta: s,
                x: f64::NAN,
            }
        }
    }
}

/// Integrate the full arc from a known outer seed and evaluate the
/// integrals.
fn torus_gap_from_seed(
    space: &AmbientSpace,
    h: &PrescribedH,
    x_seed: f64,
    opts: &TorusOpts,
) -> Result<TorusGapResult, TorusError> {
    let rhs = |theta: f64, y: &[f64; 2]| -> Result<[f64; 2], FieldIssue> {
        theta_field(space, h, theta, y[0])
    };
    let cfg = theta_solver_config(h, opts);
    let mut solver =
        Dopri5::new(rhs, PI / 2.0, [x_seed, 0.0], cfg).map_err(|_| TorusError::ArcDegenerate {
            theta: PI / 2.0,
            x: x_seed,
        })?;

    let mut nu_min = nu_of(space, PI / 2.0, x_seed);
    let mut theta_hat = PI / 2.0;
    let mut z_mid = 0.0;
    let mut omega_x = 0.0;
    for (leg, theta_end) in [(0, PI), (1, 1.5 * PI)] {
        while solver.s() < theta_end {
            let step = solver.step_toward(theta_end).map_err(degenerate_from)?;
            // Track the nu minimum on a fixed subgrid of each step.
            for j in 0..=8 {
                let th = step.s0 + step.h * j as f64 / 8.0;
                let nu = nu_of(space, th, step.eval(th)[0]);
                if nu < nu_min {
                    nu_min = nu;
                    theta_hat = th;
                }
            }
        }
        if leg == 0 {
            z_mid = solver.y()[1];
            omega_x = solver.y()[0];
        }
    }
    let z_end = solver.y()[1];
    let i2 = z_mid;
    let i1 = z_mid - z_end;
    Ok(TorusGapResult {
        i1,
        i2,
        gap: i2 - i1,
        theta_hat,
        nu_min,
        omega_x,
        seed_x: x_seed,
    })
}

fn require_nil_or_sl2(space: &AmbientSpace) -> Result<(), TorusError> {
    if space.kappa() > 0.0 || space.tau() <= 0.0 {
        return Err(TorusError::Unsupported {
            kappa: space.kappa(),
            tau: space.tau(),
        });
    }
    Ok(())
}

fn nu_of(space: &AmbientSpace, theta: f64, x: f64) -> f64 {
    let t = space.tau();
    theta.cos() / (1.0 + t * t * x * x).sqrt()
}

/// (dx/dθ, dz/dθ); errors when the θ′ > 0 regime is violated (denominator
/// not positive) or the point leaves the chart.
fn theta_field(
    space: &AmbientSpace,
    h: &PrescribedH,
    theta: f64,
    x: f64,
) -> Result<[f64; 2], FieldIssue> {
    if x <= 0.0 {
        return Err(FieldIssue::AxisSingular);
    }
    let (kappa, tau) = (space.kappa(), space.tau());
    if kappa < 0.0 && x * x >= (1.0 - 1e-12) * 4.0 / (-kappa) {
        return Err(FieldIssue::OutsideChart);
    }
    let sqrt_g = (1.0 + tau * tau * x * x).sqrt();
    let (sin_t, cos_t) = theta.sin_cos();
    let nu = cos_t / sqrt_g;
    let denom = 8.0 * h.eval_clamped(nu) - (4.0 - kappa * x * x) / x * sin_t;
    if denom <= 0.0 {
        return Err(FieldIssue::OutsideChart);
    }
    let dx = cos_t * (4.0 + kappa * x * x) / denom;
    let dz = 4.0 * sin_t * sqrt_g / denom;
    Ok([dx, dz])
}

/// True iff 𝔥 is non-increasing on [−1, 0] (sampled densely). Such 𝔥 admit
/// no rotational torus in these spaces: the gap is strictly positive.
pub fn nonexistence_check(h: &PrescribedH) -> bool {
    let n = 2001;
    for j in 1..n {
        let y = -1.0 + j as f64 / n as f64;
        match h.eval_dh(y) {
            Ok(d) if d <= 1e-12 => {}
            _ => return false,
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct TorusSearchResult {
    pub lambda0: f64,
    pub gap_at_lambda0: f64,
    pub i1: f64,
    pub i2: f64,
    pub nu0: f64,
    pub delta: f64,
    pub x1: f64,
    /// Reference-arc diagnostics: minimum of ν along the H₀ nodoid.
    pub reference_nu_min: f64,
    /// Sign-change brackets seen while expanding λ.
    pub brackets: Vec<(f64, f64)>,
    /// The closed profile at λ₀.
    pub nodoid: NodoidInfo,
}

/// Locate λ₀ in the step family 𝔥_λ (outer plateau H₀, inner plateau λ,
/// plateau edge ν₀ = −1/√(1 + τ²x₁²), bandwidth δ) where the torus gap
/// changes sign, then verify the λ₀ profile closes.
pub fn find_torus(
    space: &AmbientSpace,
    h0: f64,
    x1: f64,
    delta: f64,
    opts: &TorusOpts,
) -> Result<TorusSearchResult, TorusError> {
    require_nil_or_sl2(space)?;
    let tau = space.tau();
    let nu0 = -1.0 / (1.0 + tau * tau * x1 * x1).sqrt();

    // Reference arc with the constant outer plateau: its nu must dip below
    // the band's effective depth (where the realized transition has dropped
    // halfway to the outer plateau), otherwise the inner plateau screens the
    // whole descent and no sign change can occur.
    let reference = torus_gap(space, &PrescribedH::constant(h0), x1, opts)?;
    let delta_eff = delta * crate::prescribed::band_half_width_fraction();
    if reference.nu_min >= nu0 - delta_eff {
        return Err(TorusError::DeltaTooWide {
            nu_min: reference.nu_min,
            nu0,
            delta: delta_eff,
        });
    }
    if reference.gap <= 0.0 {
        return Err(TorusError::NonPositiveBaseGap { gap: reference.gap });
    }

    let gap_at = |lambda: f64| -> Result<TorusGapResult, TorusError> {
        let hl = PrescribedH::step_family(StepFamilySpec {
            h0,
            lambda,
            nu0,
            delta,
        })?;
        torus_gap(space, &hl, x1, opts)
    };

    // Geometric bracketing: the gap is positive at the outer plateau and
    // dips negative over a finite window of inner-plateau heights (for large
    // lambda the arc stalls against the band and the gap decays to 0+ from
    // above). The factor is kept below 2 so a window wider than half an
    // octave cannot be stepped over.
    let lambda_max = opts.lambda_max_factor * h0;
    let mut brackets = Vec::new();
    let mut lo = h0;
    let mut g_lo = reference.gap;
    let mut lambda = 1.5 * h0;
    let (mut hi, g_hi);
    loop {
        let g = gap_at(lambda)?.gap;
        if g < 0.0 {
            hi = lambda;
            g_hi = g;
            brackets.push((lo, hi));
            break;
        }
        lo = lambda;
        g_lo = g;
        lambda *= 1.5;
        if lambda > lambda_max {
            return Err(TorusError::NoCrossing {
                lambda_max,
                last_gap: g_lo,
            });
        }
    }
    let _ = g_hi;

    // Bisect on the sign of the gap down to |gap| < gap_tol.
    let mut result = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = gap_at(mid)?;
        if r.gap.abs() < opts.gap_tol {
            result = Some((mid, r));
            break;
        }
        if r.gap > 0.0 {
            lo = mid;
            g_lo = r.gap;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-15 * hi {
            result = Some((mid, r));
            break;
        }
    }
    let _ = g_lo;
    let (lambda0, r0) = result.ok_or(TorusError::NoCrossing {
        lambda_max,
        last_gap: f64::NAN,
    })?;
    if r0.gap.abs() >= opts.gap_tol {
        return Err(TorusError::NoCrossing {
            lambda_max,
            last_gap: r0.gap,
        });
    }

    // Re-integrate the full profile in arc length and assert closure. The
    // nodoid is seeded at the outer radius the shooting found for lambda0.
    let h_star = PrescribedH::step_family(StepFamilySpec {
        h0,
        lambda: lambda0,
        nu0,
        delta,
    })?;
    let outer_seed = shoot_omega_radius(space, &h_star, x1, opts)?;
    let nodoid = crate::classify::trace_nodoid(space, &h_star, outer_seed, &opts.base)?;
    if !nodoid.closes {
        return Err(TorusError::ProfileNotClosed {
            lambda0,
            residual: nodoid.closure_residual,
        });
    }
    Ok(TorusSearchResult {
        lambda0,
        gap_at_lambda0: r0.gap,
        i1: r0.i1,
        i2: r0.i2,
        nu0,
        delta,
        x1,
        reference_nu_min: reference.nu_min,
        brackets,
        nodoid,
    })
}
