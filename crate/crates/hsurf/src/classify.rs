//! Constructive classification of complete rotational surfaces of prescribed
//! mean curvature.
//!
//! Every complete rotational example arises from one of a handful of seeds in
//! the phase plane: the equilibrium (vertical cylinder), the axis (sphere),
//! y = 0 seeds inside the sphere orbit (unduloids) or beyond it (nodoids),
//! the equator seed in S²(κ)×ℝ (a rotational torus), and — in Berger
//! spheres — the unique Θ₋₁ separatrix seed ξ₀ whose orbit escapes toward
//! the antipodal fiber. [`classify`] dispatches a seed to the right
//! constructor; the constructors are public on their own.

use crate::ambient::AmbientSpace;
use crate::integrate::{
    axis_start, integrate, AngularState, Budget, Direction, EventKind, IntegrateError,
    IntegrateOpts, Orientation, PeriodClosureSpec, StopSpec, Trajectory, DEFAULT_AXIS_SEED,
};
use crate::phaseplane::{equilibrium, Eps};
use crate::prescribed::PrescribedH;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("space (kappa = {kappa}, tau = {tau}) is a space form; classification needs a proper E(kappa,tau) geometry (set degenerate_ok to use it as an oracle)")]
    SpaceFormRejected { kappa: f64, tau: f64 },
    #[error("prescribed function fails the admissibility check: min margin {margin} at y = {y}")]
    InadmissiblePrescribed { y: f64, margin: f64 },
    #[error("operation unsupported in this space: {0}")]
    UnsupportedSpace(String),
    #[error("seed x0 = {x0} is not below the equilibrium radius {e0}")]
    SeedOnWrongSide { x0: f64, e0: f64 },
    #[error("seed x0 = {x0} is not an unduloid seed (sphere equator r0 = {r0})")]
    NotAnUnduloid { x0: f64, r0: f64 },
    #[error("nodoid seed x0 = {x0} must exceed the sphere equator r0 = {r0}")]
    SeedBelowEquator { x0: f64, r0: f64 },
    #[error("seed x0 = {x0} lies within {tol} of the separatrix value {separatrix}; classification is tolerance-dominated there")]
    AmbiguousSeed { x0: f64, separatrix: f64, tol: f64 },
    #[error("orbit met the boundary before closing (event {0:?})")]
    MeetsOmega(EventKind),
    #[error("classification failed: {0}")]
    Failure(String),
    #[error("profile did not close: residual {residual} exceeds {tol}")]
    NoClosure { residual: f64, tol: f64 },
    #[error("separatrix search failed: bracket [{lo}, {hi}], {report}")]
    SearchFailure { lo: f64, hi: f64, report: String },
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Tolerances and budgets for the constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOpts {
    pub rtol: f64,
    pub atol: f64,
    pub axis_seed: f64,
    /// Max |z₂ + z₀| for a nodoid profile to count as closed.
    pub closure_tol: f64,
    /// Poincaré return distance in (x, ν) for periodic orbits.
    pub period_tol: f64,
    /// Seeds within this distance of a separatrix value are refused.
    pub seed_tol: f64,
    /// |ν| below which reaching the x budget counts as an escape.
    pub escape_nu_tol: f64,
    /// Bracket width for the pole-orbit bisection.
    pub xi_tol: f64,
    pub arc_budget: f64,
    pub x_max: Option<f64>,
    /// Continued-fraction denominator cap for the compactness trichotomy.
    pub max_rational_den: u64,
    /// Tolerance on the drift/period ratio.
    pub drift_ratio_tol: f64,
}

impl Default for ClassifyOpts {
    fn default() -> Self {
        ClassifyOpts {
            rtol: 1e-10,
            atol: 1e-12,
            axis_seed: DEFAULT_AXIS_SEED,
            closure_tol: 1e-6,
            period_tol: 1e-8,
            seed_tol: 1e-9,
            escape_nu_tol: 0.01,
            xi_tol: 1e-8,
            arc_budget: 200.0,
            x_max: None,
            max_rational_den: 64,
            drift_ratio_tol: 1e-9,
        }
    }
}

impl ClassifyOpts {
    fn integrate_opts(&self) -> IntegrateOpts {
        IntegrateOpts {
            rtol: self.rtol,
            atol: self.atol,
            ..Default::default()
        }
    }

    fn budget(&self, space: &AmbientSpace) -> Budget {
        let mut b = Budget::for_space(space).with_arc(self.arc_budget);
        if let Some(xm) = self.x_max {
            b = b.with_x_max(xm);
        }
        b
    }
}

/// Compactness of the Berger pole chain, decided by the rationality of the
/// height drift against the pole period 4πτ/κ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compactness {
    EmbeddedTorus,
    ImmersedTorus { p: i64, q: u64 },
    DenseNoncompact,
}

/// Classification outcome, serializable as a tagged record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum SurfaceClass {
    Cylinder {
        radius: f64,
        cmc: f64,
        hopf_torus: bool,
    },
    Sphere {
        r0: f64,
        height: f64,
        embedded: bool,
    },
    Unduloid {
        neck: f64,
        bulge: f64,
        arc_period: f64,
        z_pitch: f64,
    },
    Nodoid {
        outer: f64,
        omega_x: f64,
        inner: f64,
        z0: f64,
        z2: f64,
        closes: bool,
        closure_residual: f64,
    },
    TorusS2xR {
        outer: f64,
        inner: f64,
        height: f64,
        closure_residual: f64,
    },
    TorusRotational {
        outer: f64,
        omega_x: f64,
        inner: f64,
        lambda0: f64,
    },
    BergerPoleChain {
        xi0: f64,
        z_drift: f64,
        compactness: Compactness,
    },
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: SurfaceClass,
    pub profile: Trajectory,
}

/// Seed for [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifySeed {
    Axis,
    Equilibrium,
    Y0 { x0: f64, eps: i8 },
    S2xrEquator,
    BergerPole,
}

#[derive(Debug, Clone)]
pub struct CylinderInfo {
    pub radius: f64,
    pub cmc: f64,
    pub hopf_torus: bool,
    pub profile: Trajectory,
}

#[derive(Debug, Clone)]
pub struct SphereInfo {
    pub r0: f64,
    pub height: f64,
    pub embedded: bool,
    pub profile: Trajectory,
}

#[derive(Debug, Clone)]
pub struct UnduloidInfo {
    pub neck: f64,
    pub bulge: f64,
    pub arc_period: f64,
    pub z_pitch: f64,
    pub profile: Trajectory,
}

#[derive(Debug, Clone)]
pub struct NodoidInfo {
    pub outer: f64,
    pub omega_x: f64,
    pub inner: f64,
    pub z0: f64,
    pub z2: f64,
    pub closes: bool,
    pub closure_residual: f64,
    pub profile: Trajectory,
}

#[derive(Debug, Clone)]
pub struct S2xrTorusInfo {
    pub outer: f64,
    pub inner: f64,
    pub height: f64,
    pub closure_residual: f64,
    pub profile: Trajectory,
}

#[derive(Debug, Clone)]
pub struct BergerPoleInfo {
    pub xi0: f64,
    pub bracket: (f64, f64),
    pub z_drift: f64,
    pub compactness: Compactness,
    pub e_minus1_x: f64,
    pub profile: Trajectory,
}

/// Shared entry gate: proper space (unless flagged) and admissible 𝔥.
pub fn check_inputs(space: &AmbientSpace, h: &PrescribedH) -> Result<(), ClassifyError> {
    if space.is_space_form() && !space.degenerate_ok() {
        return Err(ClassifyError::SpaceFormRejected {
            kappa: space.kappa(),
            tau: space.tau(),
        });
    }
    let report = h.validate_c1(space);
    if !report.passed {
        let worst = if report.min_positivity.value <= 0.0 {
            report.min_positivity
        } else {
            report.min_class_margin
        };
        return Err(ClassifyError::InadmissiblePrescribed {
            y: worst.y,
            margin: worst.value,
        });
    }
    Ok(())
}

/// The vertical cylinder over the equilibrium radius; a Hopf torus when the
/// space is a Berger sphere.
pub fn build_cylinder(
    space: &AmbientSpace,
    h: &PrescribedH,
    opts: &ClassifyOpts,
) -> Result<CylinderInfo, ClassifyError> {
    check_inputs(space, h)?;
    let e0 = equilibrium(space, h, Eps::Plus).expect("e0 exists for admissible h");
    let init = AngularState::new(0.0, e0.x, 0.0, PI / 2.0);
    let profile = integrate(
        space,
        h,
        init,
        &StopSpec::budget_only(),
        &opts.budget(space).with_arc(10.0),
        &opts.integrate_opts(),
    )?;
    Ok(CylinderInfo {
        radius: e0.x,
        cmc: h.eval_clamped(0.0),
        hopf_torus: space.kappa() > 0.0 && space.tau() > 0.0,
        profile,
    })
}

/// Shoot the rotational sphere: integrate from the regularized axis seed to
/// the equator crossing and close the profile by the even symmetry.
pub fn shoot_sphere(
    space: &AmbientSpace,
    h: &PrescribedH,
    opts: &ClassifyOpts,
) -> Result<SphereInfo, ClassifyError> {
    check_inputs(space, h)?;
    let init = axis_start(space, h, Orientation::Up, opts.axis_seed);
    let half = integrate(
        space,
        h,
        init,
        &StopSpec::after_y0(1),
        &opts.budget(space),
        &opts.integrate_opts(),
    )?;
    let crossing = half
        .first_event(EventKind::Y0Crossing)
        .copied()
        .ok_or_else(|| {
            ClassifyError::Failure(format!(
                "sphere shot ended without an equator crossing (last event {:?})",
                half.events.last().map(|e| e.kind)
            ))
        })?;
    let r0 = crossing.state.x;
    let z_mid = crossing.state.z;
    let height = 2.0 * z_mid;
    let embedded = match space.vertical_period() {
        Some(period) => height < period,
        None => true,
    };
    let profile = mirror_about_crossing(&half, crossing.state);
    Ok(SphereInfo {
        r0,
        height,
        embedded,
        profile,
    })
}

/// Extend a trajectory ending at a y = 0 crossing by its mirror image under
/// the even symmetry (rotation by π about the horizontal geodesic at the
/// crossing height).
fn mirror_about_crossing(half: &Trajectory, mid: AngularState) -> Trajectory {
    let mut samples = half.samples.clone();
    for st in half.samples.iter().rev().skip(1) {
        samples.push(AngularState::new(
            2.0 * mid.s - st.s,
            st.x,
            2.0 * mid.z - st.z,
            PI - st.theta,
        ));
    }
    let mut events = half.events.clone();
    for e in half.events.iter().rev() {
        if (e.s - mid.s).abs() < 1e-14 {
            continue;
        }
        let kind = match e.kind {
            EventKind::OmegaPlus => EventKind::OmegaMinus,
            EventKind::OmegaMinus => EventKind::OmegaPlus,
            k => k,
        };
        events.push(Event {
            kind,
            s: 2.0 * mid.s - e.s,
            state: AngularState::new(
                2.0 * mid.s - e.state.s,
                e.state.x,
                2.0 * mid.z - e.state.z,
                PI - e.state.theta,
            ),
        });
    }
    Trajectory { samples, events }
}

use crate::integrate::Event;

/// Periodic Θ₁ orbit through (x0, 0): the unduloid with neck radius x0.
pub fn trace_unduloid(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    opts: &ClassifyOpts,
) -> Result<UnduloidInfo, ClassifyError> {
    check_inputs(space, h)?;
    let e0 = equilibrium(space, h, Eps::Plus).expect("e0 exists").x;
    if (x0 - e0).abs() < opts.seed_tol {
        return Err(ClassifyError::AmbiguousSeed {
            x0,
            separatrix: e0,
            tol: opts.seed_tol,
        });
    }
    if x0 >= e0 {
        let r0 = shoot_sphere(space, h, opts)?.r0;
        if x0 >= r0 {
            return Err(ClassifyError::NotAnUnduloid { x0, r0 });
        }
        return Err(ClassifyError::SeedOnWrongSide { x0, e0 });
    }
    if !x0.is_finite() || x0 <= 0.0 {
        return Err(ClassifyError::Failure(format!(
            "seed x0 = {x0} not positive"
        )));
    }
    trace_periodic_plus_orbit(space, h, x0, opts)
}

/// Core periodic-orbit trace in Θ₁; accepts either neck-side or bulge-side
/// y = 0 seeds and reports (neck, bulge) = (min, max) crossing radii.
fn trace_periodic_plus_orbit(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    opts: &ClassifyOpts,
) -> Result<UnduloidInfo, ClassifyError> {
    let init = AngularState::new(0.0, x0, 0.0, PI / 2.0);
    let stop = StopSpec {
        period_closure: Some(PeriodClosureSpec {
            x_ref: x0,
            nu_ref: 0.0,
            tol: opts.period_tol,
            min_arc: 0.0,
        }),
        ..Default::default()
    };
    let traj = integrate(
        space,
        h,
        init,
        &stop,
        &opts.budget(space),
        &opts.integrate_opts(),
    )?;
    if let Some(e) = traj
        .events
        .iter()
        .find(|e| matches!(e.kind, EventKind::OmegaPlus | EventKind::OmegaMinus))
    {
        return Err(ClassifyError::MeetsOmega(e.kind));
    }
    let closure = traj
        .first_event(EventKind::PeriodClosure)
        .copied()
        .ok_or_else(|| {
            ClassifyError::Failure(format!(
                "orbit through ({x0}, 0) did not close within the budget (events: {:?})",
                traj.events.iter().map(|e| e.kind).collect::<Vec<_>>()
            ))
        })?;
    let other = traj
        .events_of(EventKind::Y0Crossing)
        .map(|e| e.state.x)
        .fold(x0, |acc, x| {
            if (x - x0).abs() > (acc - x0).abs() {
                x
            } else {
                acc
            }
        });
    Ok(UnduloidInfo {
        neck: x0.min(other),
        bulge: x0.max(other),
        arc_period: closure.s,
        z_pitch: closure.state.z,
        profile: traj,
    })
}

/// Nodoid through the outer y = 0 crossing x0 > r₀: one full Θ₁ arc plus the
/// Θ₋₁ continuation. `z0` is the height of the Ω⁻ contact, `z2` of the Ω⁺
/// contact that ends the Θ₋₁ sweep; the profile closes iff z2 = −z0.
pub fn trace_nodoid(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    opts: &ClassifyOpts,
) -> Result<NodoidInfo, ClassifyError> {
    check_inputs(space, h)?;
    let r0 = shoot_sphere(space, h, opts)?.r0;
    trace_nodoid_with_r0(space, h, x0, r0, opts)
}

fn trace_nodoid_with_r0(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    r0: f64,
    opts: &ClassifyOpts,
) -> Result<NodoidInfo, ClassifyError> {
    if (x0 - r0).abs() < opts.seed_tol {
        return Err(ClassifyError::AmbiguousSeed {
            x0,
            separatrix: r0,
            tol: opts.seed_tol,
        });
    }
    if x0 <= r0 {
        return Err(ClassifyError::SeedBelowEquator { x0, r0 });
    }
    let init = AngularState::new(0.0, x0, 0.0, PI / 2.0);
    let fwd = integrate(
        space,
        h,
        init,
        &StopSpec::after_omega(2),
        &opts.budget(space),
        &opts.integrate_opts(),
    )?;
    let omega_minus = fwd.first_event(EventKind::OmegaMinus).copied();
    let omega_plus = fwd.first_event(EventKind::OmegaPlus).copied();
    let inner_crossing = fwd
        .events_of(EventKind::Y0Crossing)
        .find(|e| e.state.eps() == Eps::Minus)
        .copied();
    let (Some(om), Some(op), Some(inner)) = (omega_minus, omega_plus, inner_crossing) else {
        return Err(ClassifyError::Failure(format!(
            "nodoid arc through ({x0}, 0) produced events {:?}",
            fwd.events.iter().map(|e| e.kind).collect::<Vec<_>>()
        )));
    };
    if !(om.s < inner.s && inner.s < op.s) {
        return Err(ClassifyError::Failure(
            "nodoid events out of order".to_string(),
        ));
    }
    let back = integrate(
        space,
        h,
        init,
        &StopSpec::after_omega(1),
        &opts.budget(space),
        &IntegrateOpts {
            direction: Direction::Backward,
            ..opts.integrate_opts()
        },
    )?;
    let profile = fwd.with_prequel(back);

    let z0 = om.state.z;
    let z2 = op.state.z;
    let closure_residual = (z2 + z0).abs();
    Ok(NodoidInfo {
        outer: x0,
        omega_x: om.state.x,
        inner: inner.state.x,
        z0,
        z2,
        closes: closure_residual < opts.closure_tol,
        closure_residual,
        profile,
    })
}

/// The rotational torus of S²(κ)×ℝ: the profile through the equator fiber
/// with vertical tangent, closed by the antipodal symmetry.
pub fn s2r_torus(
    space: &AmbientSpace,
    h: &PrescribedH,
    opts: &ClassifyOpts,
) -> Result<S2xrTorusInfo, ClassifyError> {
    check_inputs(space, h)?;
    if space.kappa() <= 0.0 || space.tau() != 0.0 {
        return Err(ClassifyError::UnsupportedSpace(format!(
            "S2xR torus requires kappa > 0, tau = 0; got ({}, {})",
            space.kappa(),
            space.tau()
        )));
    }
    let x_eq = 2.0 / space.kappa().sqrt();
    let init = AngularState::new(0.0, x_eq, 0.0, 0.0);
    let traj = integrate(
        space,
        h,
        init,
        &StopSpec::after_omega(2),
        &opts.budget(space),
        &opts.integrate_opts(),
    )?;
    let crossings: Vec<f64> = traj
        .events_of(EventKind::Y0Crossing)
        .map(|e| e.state.x)
        .collect();
    let top = traj.first_event(EventKind::OmegaMinus).copied();
    let (Some(top), [outer, inner]) = (top, crossings.as_slice()) else {
        return Err(ClassifyError::Failure(format!(
            "equator orbit produced events {:?}",
            traj.events.iter().map(|e| e.kind).collect::<Vec<_>>()
        )));
    };
    let end = traj.final_state();
    let closure_residual = (end.x - x_eq)
        .abs()
        .max(end.z.abs())
        .max((end.nu(space) - 1.0).abs());
    if closure_residual > opts.closure_tol {
        return Err(ClassifyError::NoClosure {
            residual: closure_residual,
            tol: opts.closure_tol,
        });
    }
    Ok(S2xrTorusInfo {
        outer: *outer,
        inner: *inner,
        height: top.state.z,
        closure_residual,
        profile: traj,
    })
}

/// Which side of the Θ₋₁ separatrix a probe seed sits on.
#[derive(Debug, Clone, Copy, PartialEq)]
enum PoleSide {
    /// Nodoid sweep: below ξ₀.
    OmegaSide,
    /// Closed orbit around e₋₁: above ξ₀.
    ReturnSide,
}

/// Decide the side of a seed with bounded cost. Orbits that commit within
/// x ≤ x_probe do so by an actual event (Ω contact or y = 0 return). Orbits
/// still outrunning the budget ride the escape asymptotics, where
/// 2π − θ ≈ 4𝔥(0)/(κx) on the separatrix while the deviation of neighbours
/// grows like x²; the sign of D = x(2π − θ) − 4𝔥(0)/κ at exit then separates
/// the sides with a bias of order 1/x_probe³.
fn pole_side(
    space: &AmbientSpace,
    h: &PrescribedH,
    xi: f64,
    x_probe: f64,
    opts: &ClassifyOpts,
) -> Result<PoleSide, ClassifyError> {
    let tau = space.tau();
    let budget = Budget {
        max_arc: tau * x_probe * x_probe + 100.0,
        x_max: x_probe,
        max_events: 8,
    };
    let stop = StopSpec {
        y0_crossings: Some(1),
        omega_contacts: Some(1),
        ..Default::default()
    };
    let init = AngularState::new(0.0, xi, 0.0, 1.5 * PI);
    let traj = integrate(space, h, init, &stop, &budget, &opts.integrate_opts())?;
    let last = traj
        .events
        .last()
        .ok_or_else(|| ClassifyError::Failure("pole probe produced no events".to_string()))?;
    match last.kind {
        EventKind::Y0Crossing => Ok(PoleSide::ReturnSide),
        EventKind::OmegaPlus | EventKind::OmegaMinus => Ok(PoleSide::OmegaSide),
        EventKind::EscapeXMax => {
            let st = last.state;
            let d = st.x * (2.0 * PI - st.theta) - 4.0 * h.eval_clamped(0.0) / space.kappa();
            if d <= 0.0 {
                Ok(PoleSide::OmegaSide)
            } else {
                Ok(PoleSide::ReturnSide)
            }
        }
        other => Err(ClassifyError::Failure(format!(
            "pole probe at xi = {xi} ended with {other:?}"
        ))),
    }
}

/// Bisect the Θ₋₁ axis seed between nodoid-type orbits (reach Ω) and closed
/// orbits around e₋₁ (return to y = 0). The separatrix seed ξ₀ launches the
/// orbit escaping toward the antipodal fiber both ways; its height drift
/// against the pole period 4πτ/κ decides compactness.
pub fn berger_pole_orbit(
    space: &AmbientSpace,
    h: &PrescribedH,
    opts: &ClassifyOpts,
) -> Result<BergerPoleInfo, ClassifyError> {
    check_inputs(space, h)?;
    if !(space.kappa() > 0.0 && space.tau() > 0.0) {
        return Err(ClassifyError::UnsupportedSpace(format!(
            "pole orbit requires a Berger sphere; got ({}, {})",
            space.kappa(),
            space.tau()
        )));
    }
    let e1 = equilibrium(space, h, Eps::Minus)
        .expect("e_{-1} exists for kappa > 0")
        .x;
    let x_probe = opts
        .x_max
        .unwrap_or(2000.0 / space.kappa().sqrt())
        .max(4.0 * e1);

    // Outer bracket: seeds just below e₋₁ lie on small closed orbits; small
    // seeds lie on nodoid sweeps that reach Ω.
    let mut hi = (1.0 - 1e-3) * e1;
    match pole_side(space, h, hi, x_probe, opts)? {
        PoleSide::ReturnSide => {}
        PoleSide::OmegaSide => {
            return Err(ClassifyError::SearchFailure {
                lo: 0.0,
                hi,
                report: "seed near e_-1 gave an Omega sweep, expected a closed orbit".to_string(),
            })
        }
    }
    let mut lo = 0.25 * e1;
    while pole_side(space, h, lo, x_probe, opts)? == PoleSide::ReturnSide {
        hi = hi.min(lo);
        lo *= 0.5;
        if lo < 1e-6 * e1 {
            return Err(ClassifyError::SearchFailure {
                lo,
                hi,
                report: "no Omega-side seed found above 1e-6 * e_-1".to_string(),
            });
        }
    }

    while hi - lo > opts.xi_tol {
        let mid = 0.5 * (lo + hi);
        match pole_side(space, h, mid, x_probe, opts)? {
            PoleSide::OmegaSide => lo = mid,
            PoleSide::ReturnSide => hi = mid,
        }
    }
    let xi0 = 0.5 * (lo + hi);

    // Escape run from the midpoint for the drift; by the y ↦ −y symmetry the
    // drift is −2 z(escape). Beyond the budget the escape rides just inside
    // Ω with sin θ ≈ −4𝔥(0)/(κx), so the missing tail of z is
    // −16𝔥(0)τ/(κ²x_max) to leading order.
    let x_far = x_probe.max(200.0 / space.kappa().sqrt());
    let tau = space.tau();
    let kappa = space.kappa();
    let budget = Budget {
        max_arc: tau * x_far * x_far + 100.0,
        x_max: x_far,
        max_events: 8,
    };
    let init = AngularState::new(0.0, xi0, 0.0, 1.5 * PI);
    let fwd = integrate(
        space,
        h,
        init,
        &StopSpec::budget_only(),
        &budget,
        &opts.integrate_opts(),
    )?;
    let end = fwd.final_state();
    let tail = 16.0 * h.eval_clamped(0.0) * tau / (kappa * kappa * end.x.max(1.0));
    let z_drift = -2.0 * (end.z - tail);
    let back = integrate(
        space,
        h,
        init,
        &StopSpec::budget_only(),
        &budget,
        &IntegrateOpts {
            direction: Direction::Backward,
            ..opts.integrate_opts()
        },
    )?;
    let profile = fwd.with_prequel(back);

    let compactness =
        berger_compactness_with(z_drift, space, opts.max_rational_den, opts.drift_ratio_tol)?;
    Ok(BergerPoleInfo {
        xi0,
        bracket: (lo, hi),
        z_drift,
        compactness,
        e_minus1_x: e1,
        profile,
    })
}

/// Compactness trichotomy for a pole-chain height drift in a Berger sphere:
/// drift equal to the pole period 4πτ/κ closes smoothly (embedded torus), a
/// rational multiple closes after finitely many branches (immersed torus),
/// an irrational multiple is dense in a solid torus.
pub fn berger_compactness(drift: f64, space: &AmbientSpace) -> Result<Compactness, ClassifyError> {
    berger_compactness_with(drift, space, 64, 1e-9)
}

pub fn berger_compactness_with(
    drift: f64,
    space: &AmbientSpace,
    max_den: u64,
    ratio_tol: f64,
) -> Result<Compactness, ClassifyError> {
    let period = space.pole_height_shift().ok_or_else(|| {
        ClassifyError::UnsupportedSpace(format!(
            "compactness trichotomy requires a Berger sphere; got ({}, {})",
            space.kappa(),
            space.tau()
        ))
    })?;
    Ok(compactness_from_ratio(drift, period, max_den, ratio_tol))
}

/// Classify a drift/period ratio by continued-fraction rational recognition.
pub fn compactness_from_ratio(drift: f64, period: f64, max_den: u64, tol: f64) -> Compactness {
    match rational_approx(drift / period, max_den, tol) {
        Some((p, q)) if p.unsigned_abs() == q => Compactness::EmbeddedTorus,
        Some((p, q)) => Compactness::ImmersedTorus { p, q },
        None => Compactness::DenseNoncompact,
    }
}

/// Best rational p/q with q ≤ max_den and |x − p/q| ≤ tol, from the
/// continued-fraction convergents of x. For tol < 1/(2·max_den²) every such
/// approximation is a convergent, so scanning convergents is exhaustive.
pub fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1i64 } else { 1i64 };
    let target = x.abs();
    let (mut p_prev, mut q_prev) = (1i64, 0u64);
    let (mut p, mut q) = (target.floor() as i64, 1u64);
    let mut frac = target - target.floor();
    for _ in 0..64 {
        if (p as f64 / q as f64 - target).abs() <= tol {
            return Some((sign * p, q));
        }
        if frac.abs() < 1e-18 {
            break;
        }
        let v = 1.0 / frac;
        let a = v.floor();
        frac = v - a;
        let a = a as i64;
        let p_next = a.checked_mul(p)?.checked_add(p_prev)?;
        let q_next = (a as u64).checked_mul(q)?.checked_add(q_prev)?;
        if q_next > max_den {
            return None;
        }
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    ((p as f64 / q as f64 - target).abs() <= tol).then_some((sign * p, q))
}

/// Dispatch a seed to its surface class.
pub fn classify(
    space: &AmbientSpace,
    h: &PrescribedH,
    seed: ClassifySeed,
    opts: &ClassifyOpts,
) -> Result<Classification, ClassifyError> {
    check_inputs(space, h)?;
    match seed {
        ClassifySeed::Equilibrium => {
            let c = build_cylinder(space, h, opts)?;
            Ok(Classification {
                class: SurfaceClass::Cylinder {
                    radius: c.radius,
                    cmc: c.cmc,
                    hopf_torus: c.hopf_torus,
                },
                profile: c.profile,
            })
        }
        ClassifySeed::Axis => {
            let s = shoot_sphere(space, h, opts)?;
            Ok(Classification {
                class: SurfaceClass::Sphere {
                    r0: s.r0,
                    height: s.height,
                    embedded: s.embedded,
                },
                profile: s.profile,
            })
        }
        ClassifySeed::S2xrEquator => {
            let t = s2r_torus(space, h, opts)?;
            Ok(Classification {
                class: SurfaceClass::TorusS2xR {
                    outer: t.outer,
                    inner: t.inner,
                    height: t.height,
                    closure_residual: t.closure_residual,
                },
                profile: t.profile,
            })
        }
        ClassifySeed::BergerPole => {
            let b = berger_pole_orbit(space, h, opts)?;
            Ok(Classification {
                class: SurfaceClass::BergerPoleChain {
                    xi0: b.xi0,
                    z_drift: b.z_drift,
                    compactness: b.compactness,
                },
                profile: b.profile,
            })
        }
        ClassifySeed::Y0 { x0, eps } => {
            if eps >= 0 {
                classify_y0_plus(space, h, x0, opts)
            } else {
                classify_y0_minus(space, h, x0, opts)
            }
        }
    }
}

fn classify_y0_plus(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    opts: &ClassifyOpts,
) -> Result<Classification, ClassifyError> {
    let e0 = equilibrium(space, h, Eps::Plus).expect("e0 exists").x;
    let sphere = shoot_sphere(space, h, opts)?;
    for separatrix in [e0, sphere.r0] {
        if (x0 - separatrix).abs() < opts.seed_tol {
            return Err(ClassifyError::AmbiguousSeed {
                x0,
                separatrix,
                tol: opts.seed_tol,
            });
        }
    }
    if x0 > sphere.r0 {
        let n = trace_nodoid_with_r0(space, h, x0, sphere.r0, opts)?;
        return Ok(nodoid_classification(n));
    }
    let u = trace_periodic_plus_orbit(space, h, x0, opts)?;
    Ok(Classification {
        class: SurfaceClass::Unduloid {
            neck: u.neck,
            bulge: u.bulge,
            arc_period: u.arc_period,
            z_pitch: u.z_pitch,
        },
        profile: u.profile,
    })
}

fn nodoid_classification(n: NodoidInfo) -> Classification {
    Classification {
        class: SurfaceClass::Nodoid {
            outer: n.outer,
            omega_x: n.omega_x,
            inner: n.inner,
            z0: n.z0,
            z2: n.z2,
            closes: n.closes,
            closure_residual: n.closure_residual,
        },
        profile: n.profile,
    }
}

/// Θ₋₁ seeds are classified by the fate of their orbit: a y = 0 return is a
/// closed (unduloid-type) orbit, an Ω contact continues into a nodoid, an
/// axis contact is the sphere through the antipodal axis (κ > 0, τ = 0), and
/// an escape identifies the Berger separatrix.
fn classify_y0_minus(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    opts: &ClassifyOpts,
) -> Result<Classification, ClassifyError> {
    if let Some(e1) = equilibrium(space, h, Eps::Minus) {
        if (x0 - e1.x).abs() < opts.seed_tol {
            return Err(ClassifyError::AmbiguousSeed {
                x0,
                separatrix: e1.x,
                tol: opts.seed_tol,
            });
        }
    }
    let init = AngularState::new(0.0, x0, 0.0, 1.5 * PI);
    let stop = StopSpec {
        y0_crossings: Some(1),
        omega_contacts: Some(1),
        axis_contact: true,
        ..Default::default()
    };
    let probe = integrate(
        space,
        h,
        init,
        &stop,
        &opts.budget(space),
        &opts.integrate_opts(),
    )?;
    let Some(last) = probe.events.last().copied() else {
        return Err(ClassifyError::Failure("empty probe".to_string()));
    };
    match last.kind {
        EventKind::Y0Crossing => {
            let u = trace_closed_minus_orbit(space, h, x0, opts)?;
            Ok(Classification {
                class: SurfaceClass::Unduloid {
                    neck: u.neck,
                    bulge: u.bulge,
                    arc_period: u.arc_period,
                    z_pitch: u.z_pitch,
                },
                profile: u.profile,
            })
        }
        EventKind::OmegaPlus | EventKind::OmegaMinus => {
            // Continue through Ω into Θ₁: the next y = 0 crossing is the
            // nodoid's outer radius.
            let cont = integrate(
                space,
                h,
                init,
                &StopSpec::after_y0(1),
                &opts.budget(space),
                &opts.integrate_opts(),
            )?;
            let outer = cont
                .first_event(EventKind::Y0Crossing)
                .map(|e| e.state.x)
                .ok_or_else(|| {
                    ClassifyError::Failure("no outer crossing after Omega".to_string())
                })?;
            let r0 = shoot_sphere(space, h, opts)?.r0;
            let n = trace_nodoid_with_r0(space, h, outer, r0, opts)?;
            Ok(nodoid_classification(n))
        }
        EventKind::AxisContact => {
            // No Θ₋₁ orbit reaches the axis; hitting it means the event
            // classifier or the seed is off.
            Err(ClassifyError::Failure(format!(
                "Theta_-1 orbit through ({x0}, 0) contacted the axis at s = {}",
                last.s
            )))
        }
        EventKind::EscapeXMax => {
            if space.tau() > 0.0 {
                let b = berger_pole_orbit(space, h, opts)?;
                Ok(Classification {
                    class: SurfaceClass::BergerPoleChain {
                        xi0: b.xi0,
                        z_drift: b.z_drift,
                        compactness: b.compactness,
                    },
                    profile: b.profile,
                })
            } else {
                // S²×ℝ: the escaping orbit is the sphere through the
                // antipodal axis; the seed sits on its separatrix.
                Err(ClassifyError::AmbiguousSeed {
                    x0,
                    separatrix: x0,
                    tol: opts.seed_tol,
                })
            }
        }
        other => Err(ClassifyError::Failure(format!(
            "probe ended with {other:?}"
        ))),
    }
}

/// Closed Θ₋₁ orbit (κ > 0) through (x0, 0): crossings alternate sides of
/// e₋₁; the second one closes the loop.
fn trace_closed_minus_orbit(
    space: &AmbientSpace,
    h: &PrescribedH,
    x0: f64,
    opts: &ClassifyOpts,
) -> Result<UnduloidInfo, ClassifyError> {
    let init = AngularState::new(0.0, x0, 0.0, 1.5 * PI);
    let traj = integrate(
        space,
        h,
        init,
        &StopSpec::after_y0(2),
        &opts.budget(space),
        &opts.integrate_opts(),
    )?;
    let crossings: Vec<&Event> = traj.events_of(EventKind::Y0Crossing).collect();
    let [far, ret] = crossings.as_slice() else {
        return Err(ClassifyError::Failure(format!(
            "closed orbit trace saw {} crossings",
            crossings.len()
        )));
    };
    let residual = (ret.state.x - x0).abs().max(ret.state.nu(space).abs());
    if residual > opts.period_tol.max(1e-7) {
        return Err(ClassifyError::Failure(format!(
            "orbit through ({x0}, 0) failed to close: residual {residual}"
        )));
    }
    Ok(UnduloidInfo {
        neck: x0.min(far.state.x),
        bulge: x0.max(far.state.x),
        arc_period: ret.s,
        z_pitch: ret.state.z,
        profile: traj,
    })
}
