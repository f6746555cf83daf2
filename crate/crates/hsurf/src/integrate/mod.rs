//! Adaptive integration of rotational profile curves with event detection.
//!
//! Two equivalent formulations coexist. The *phase system* evolves
//! (x, y) = (distance to axis, angle function) and degenerates on the
//! boundary Ω where z′ = 0. The *angular system*
//!
//! ```text
//! x′ = cos θ / √(1 + τ²x²)
//! z′ = 4 sin θ / (4 + κx²)
//! θ′ = (8𝔥(ν) − (4 − κx²)/x · sin θ) / ((4 + κx²)√(1 + τ²x²))
//! ```
//!
//! with ν = cos θ / √(1 + τ²x²) is regular across Ω (θ crossing 0 or π), so
//! crossings between the two ε-sheets happen automatically and are merely
//! annotated as events. The angular system is the master system here; the
//! phase field is kept for analysis and cross-checks.
//!
//! Orbits that meet the axis do so with |ν| → 1; starts at the axis are
//! regularized by a series seed ([`axis_start`]) and arrivals are detected by
//! quadratic extrapolation once x drops below a proximity band.

pub mod dopri5;

use crate::ambient::AmbientSpace;
use crate::phaseplane::{Eps, PhaseState};
use crate::prescribed::PrescribedH;
use dopri5::{bisect_on, CoreError, DenseStep, Dopri5, FieldIssue, SolverConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Default arc-length offset of the series-regularized axis seed.
pub const DEFAULT_AXIS_SEED: f64 = 1e-5;
/// Below this x, a trajectory moving toward the axis is finished by series
/// extrapolation (error O(x²) in the contact data).
const AXIS_PROX: f64 = 1e-5;
/// A sin θ = 0 event with x below this is an axis contact, not an Ω contact.
const AXIS_EVENT_XTOL: f64 = 1e-4;
/// Reaching this x without an axis-contact signature is a geometry error.
const X_FLOOR: f64 = 1e-8;
/// Fraction of the κ < 0 wall radius treated as the escape budget.
pub const WALL_FRACTION: f64 = 0.999;
/// Cap on |Δθ| per step so event sign changes cannot be skipped.
const THETA_STEP_CAP: f64 = 1.2;
/// Tolerance for event localization on the dense output.
const EVENT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone)]
pub enum IntegrateError {
    #[error("axis singularity: x = {x} at s = {s}")]
    AxisSingular { s: f64, x: f64 },
    #[error("phase radicand negative beyond tolerance: 1-(1+tau^2 x^2)y^2 = {value}")]
    NegativeRadicand { value: f64 },
    #[error("step size underflow at s = {s}, state (x, z, theta) = ({x}, {z}, {theta})")]
    Stiffness { s: f64, x: f64, z: f64, theta: f64 },
    #[error("x fell to {x} at s = {s} without an axis-contact signature")]
    Geometry { s: f64, x: f64 },
    #[error("step budget exhausted at s = {s}")]
    TooManySteps { s: f64 },
    #[error("initial state not integrable: x = {x}")]
    BadInit { x: f64 },
}

/// State of the angular system at arc length s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularState {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

impl AngularState {
    pub fn new(s: f64, x: f64, z: f64, theta: f64) -> Self {
        AngularState { s, x, z, theta }
    }

    /// Angle function ν = cos θ / √(1 + τ²x²) ∈ [−1, 1].
    pub fn nu(&self, space: &AmbientSpace) -> f64 {
        let t = space.tau();
        (self.theta.cos() / (1.0 + t * t * self.x * self.x).sqrt()).clamp(-1.0, 1.0)
    }

    /// Sheet sign ε = sign(z′) = sign(sin θ); ties resolve to +.
    pub fn eps(&self) -> Eps {
        Eps::from_sign(self.theta.sin())
    }

    pub fn phase_state(&self, space: &AmbientSpace) -> PhaseState {
        PhaseState {
            x: self.x,
            y: self.nu(space),
            eps: self.eps(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// ν = 0 (cos θ = 0).
    Y0Crossing,
    /// Contact with Ω⁺: z has a local minimum.
    OmegaPlus,
    /// Contact with Ω⁻: z has a local maximum.
    OmegaMinus,
    /// Arrival at the rotation axis with |ν| = 1.
    AxisContact,
    /// Reached the configured fraction of the κ < 0 wall radius.
    WallApproach,
    /// Reached the x budget (κ ≥ 0); toward the antipodal fiber when κ > 0.
    EscapeXMax,
    /// Return to the Poincaré section θ ≡ π/2 within tolerance of the
    /// reference state.
    PeriodClosure,
    /// Arc-length or event budget exhausted.
    StallBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub s: f64,
    pub state: AngularState,
}

/// Poincaré-section reference for periodic-orbit detection: section
/// θ ≡ π/2 (mod 2π), return distance measured in (x, ν).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodClosureSpec {
    pub x_ref: f64,
    pub nu_ref: f64,
    pub tol: f64,
    /// Crossings before this arc length are not tested (the seed itself
    /// usually sits on the section).
    pub min_arc: f64,
}

/// First-of stop conditions; budget exhaustion always stops.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StopSpec {
    pub y0_crossings: Option<usize>,
    pub omega_contacts: Option<usize>,
    pub axis_contact: bool,
    pub period_closure: Option<PeriodClosureSpec>,
}

impl StopSpec {
    pub fn budget_only() -> Self {
        StopSpec::default()
    }

    pub fn at_axis_contact() -> Self {
        StopSpec {
            axis_contact: true,
            ..Default::default()
        }
    }

    pub fn after_y0(n: usize) -> Self {
        StopSpec {
            y0_crossings: Some(n),
            ..Default::default()
        }
    }

    pub fn after_omega(n: usize) -> Self {
        StopSpec {
            omega_contacts: Some(n),
            ..Default::default()
        }
    }
}

/// Integration budget. `x_max` doubles as the wall guard for κ < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_arc: f64,
    pub x_max: f64,
    pub max_events: usize,
}

impl Budget {
    pub fn for_space(space: &AmbientSpace) -> Self {
        Budget {
            max_arc: 200.0,
            x_max: space.default_x_max(),
            max_events: 64,
        }
    }

    pub fn with_arc(mut self, max_arc: f64) -> Self {
        self.max_arc = max_arc;
        self
    }

    pub fn with_x_max(mut self, x_max: f64) -> Self {
        self.x_max = x_max;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOpts {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: Option<f64>,
    /// Emit samples on a uniform arc-length grid instead of per accepted step.
    pub sample_every: Option<f64>,
    pub direction: Direction,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        IntegrateOpts {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: None,
            sample_every: None,
            direction: Direction::Forward,
        }
    }
}

impl IntegrateOpts {
    pub fn backward(mut self) -> Self {
        self.direction = Direction::Backward;
        self
    }
}

/// Event-annotated sampled solution of the angular system.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<AngularState>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn initial_state(&self) -> AngularState {
        self.samples[0]
    }

    pub fn final_state(&self) -> AngularState {
        *self.samples.last().expect("trajectory has samples")
    }

    pub fn arc_length(&self) -> f64 {
        self.final_state().s - self.initial_state().s
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events_of(kind).next()
    }

    /// Profile polyline in the (x, z) half plane.
    pub fn profile_xz(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|st| (st.x, st.z)).collect()
    }

    /// Join an earlier piece (ending where `self` begins) in front of `self`.
    pub fn with_prequel(self, mut earlier: Trajectory) -> Trajectory {
        if let (Some(last), Some(first)) = (earlier.samples.last(), self.samples.first()) {
            if (last.s - first.s).abs() < 1e-12 {
                earlier.samples.pop();
            }
        }
        earlier.samples.extend(self.samples);
        earlier.events.extend(self.events);
        earlier
            .events
            .sort_by(|a, b| a.s.total_cmp(&b.s));
        Trajectory {
            samples: earlier.samples,
            events: earlier.events,
        }
    }
}

/// Right-hand side of the first-order phase system. `dy` is the angle-function
/// derivative along arc length.
pub fn rhs_phase(
    space: &AmbientSpace,
    h: &PrescribedH,
    state: &PhaseState,
) -> Result<(f64, f64), IntegrateError> {
    let (x, y) = (state.x, state.y);
    if x <= 0.0 {
        return Err(IntegrateError::AxisSingular { s: f64::NAN, x });
    }
    let (kappa, tau) = (space.kappa(), space.tau());
    let one_t2x2 = 1.0 + tau * tau * x * x;
    let mut radicand = 1.0 - one_t2x2 * y * y;
    if radicand < 0.0 {
        if radicand < -1e-12 {
            return Err(IntegrateError::NegativeRadicand { value: radicand });
        }
        radicand = 0.0;
    }
    let hy = h.eval_clamped(y);
    let num = 4.0
        - kappa * x * x
        - y * y * (4.0 - x * x * (kappa - 8.0 * tau * tau))
        - 8.0 * state.eps.sign() * x * hy * radicand.sqrt();
    let den = x * (4.0 + kappa * x * x) * one_t2x2;
    Ok((y, num / den))
}

/// Right-hand side of the angular system: (x′, z′, θ′).
pub fn rhs_angular(
    space: &AmbientSpace,
    h: &PrescribedH,
    state: &AngularState,
) -> Result<(f64, f64, f64), IntegrateError> {
    angular_field(space, h, state.x, state.theta).ok_or(IntegrateError::AxisSingular {
        s: state.s,
        x: state.x,
    })
}

#[inline]
fn angular_field(
    space: &AmbientSpace,
    h: &PrescribedH,
    x: f64,
    theta: f64,
) -> Option<(f64, f64, f64)> {
    if x <= 0.0 {
        return None;
    }
    let (kappa, tau) = (space.kappa(), space.tau());
    if kappa < 0.0 && x * x >= (1.0 - 1e-12) * 4.0 / (-kappa) {
        return None;
    }
    let sqrt_g = (1.0 + tau * tau * x * x).sqrt();
    let q = 4.0 + kappa * x * x;
    let (sin_t, cos_t) = theta.sin_cos();
    let nu = cos_t / sqrt_g;
    let hv = h.eval_clamped(nu);
    let dx = cos_t / sqrt_g;
    let dz = 4.0 * sin_t / q;
    let dtheta = (8.0 * hv - (4.0 - kappa * x * x) / x * sin_t) / (q * sqrt_g);
    Some((dx, dz, dtheta))
}

/// Second derivatives (x″, z″) reconstructed from the vector field.
pub fn angular_second_derivs(
    space: &AmbientSpace,
    h: &PrescribedH,
    state: &AngularState,
) -> Result<(f64, f64), IntegrateError> {
    let (dx, _dz, dtheta) = rhs_angular(space, h, state)?;
    let (kappa, tau) = (space.kappa(), space.tau());
    let x = state.x;
    let one_t2x2 = 1.0 + tau * tau * x * x;
    let sqrt_g = one_t2x2.sqrt();
    let (sin_t, cos_t) = state.theta.sin_cos();
    let ddx = -sin_t * dtheta / sqrt_g - cos_t * tau * tau * x * dx / (one_t2x2 * sqrt_g);
    let q = 4.0 + kappa * x * x;
    let ddz = (4.0 * cos_t * dtheta * q - 8.0 * sin_t * kappa * x * dx) / (q * q);
    Ok((ddx, ddz))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Up,
    Down,
}

/// Series-regularized state near an orthogonal axis crossing.
///
/// Matching leading orders of the profile system near (x, ν) = (0, 1) gives
/// ν = 1 − βs²/2 with β = 𝔥(1)² + τ², which in angular variables is the seed
/// θ = 𝔥(1)·s, x = s, z = 0 at s = s_seed. `Orientation::Down` is the mirror
/// state near ν = −1, placed at s = −s_seed so the same curve is reached
/// backward in s.
pub fn axis_start(
    space: &AmbientSpace,
    h: &PrescribedH,
    orientation: Orientation,
    s_seed: f64,
) -> AngularState {
    let _ = space;
    let c = h.eval_clamped(1.0);
    match orientation {
        Orientation::Up => AngularState::new(s_seed, s_seed, 0.0, c * s_seed),
        Orientation::Down => AngularState::new(-s_seed, s_seed, 0.0, PI - c * s_seed),
    }
}

/// Curvature coefficient β of the axis series ν = 1 − βs²/2.
pub fn axis_series_beta(space: &AmbientSpace, h: &PrescribedH) -> f64 {
    let c = h.eval_clamped(1.0);
    c * c + space.tau() * space.tau()
}

/// Integrate the angular system with event annotation.
///
/// Stops at the first satisfied [`StopSpec`] condition, at an axis contact
/// (the chart ends there), or on budget exhaustion; the final sample is the
/// located stop state.
pub fn integrate(
    space: &AmbientSpace,
    h: &PrescribedH,
    init: AngularState,
    stop: &StopSpec,
    budget: &Budget,
    opts: &IntegrateOpts,
) -> Result<Trajectory, IntegrateError> {
    match opts.direction {
        Direction::Forward => integrate_forward(space, h, init, stop, budget, opts),
        Direction::Backward => {
            let reflected = AngularState::new(init.s, init.x, init.z, PI - init.theta);
            let mut rstop = *stop;
            if let Some(pc) = rstop.period_closure.as_mut() {
                pc.nu_ref = -pc.nu_ref;
            }
            let fwd = IntegrateOpts {
                direction: Direction::Forward,
                ..*opts
            };
            let traj = integrate_forward(space, h, reflected, &rstop, budget, &fwd)?;
            Ok(reflect_trajectory(traj, init.s, init.z))
        }
    }
}

/// Map a forward trajectory of the reflected initial state back onto the
/// backward solution: s ↦ 2s₀ − s, z ↦ 2z₀ − z, θ ↦ π − θ. The reflection
/// swaps the two Ω boundary components.
fn reflect_trajectory(traj: Trajectory, s0: f64, z0: f64) -> Trajectory {
    let map_state = |st: &AngularState| {
        AngularState::new(2.0 * s0 - st.s, st.x, 2.0 * z0 - st.z, PI - st.theta)
    };
    let mut samples: Vec<AngularState> = traj.samples.iter().map(map_state).collect();
    samples.reverse();
    let mut events: Vec<Event> = traj
        .events
        .iter()
        .map(|e| Event {
            kind: match e.kind {
                EventKind::OmegaPlus => EventKind::OmegaMinus,
                EventKind::OmegaMinus => EventKind::OmegaPlus,
                other => other,
            },
            s: 2.0 * s0 - e.s,
            state: map_state(&e.state),
        })
        .collect();
    events.reverse();
    Trajectory { samples, events }
}

struct EventCounters {
    y0: usize,
    omega: usize,
}

fn integrate_forward(
    space: &AmbientSpace,
    h: &PrescribedH,
    init: AngularState,
    stop: &StopSpec,
    budget: &Budget,
    opts: &IntegrateOpts,
) -> Result<Trajectory, IntegrateError> {
    if !init.x.is_finite() || !space.contains_x(init.x) {
        return Err(IntegrateError::BadInit { x: init.x });
    }

    let mut max_step = opts.max_step.unwrap_or(f64::INFINITY);
    if let Some(feature) = h.min_feature_scale() {
        // Keep steps near the prescribed function's feature scale so the
        // band cannot be jumped over in a single step; the error controller
        // handles accuracy inside it.
        max_step = max_step.min((feature * 0.5).max(2e-4));
    }
    let cfg = SolverConfig {
        rtol: opts.rtol,
        atol: opts.atol,
        max_step,
        max_steps: 5_000_000,
    };

    let rhs = |_s: f64, y: &[f64; 3]| -> dopri5::RhsResult<3> {
        match angular_field(space, h, y[0], y[2]) {
            Some((dx, dz, dt)) => Ok([dx, dz, dt]),
            None => Err(if y[0] <= 0.0 {
                FieldIssue::AxisSingular
            } else {
                FieldIssue::OutsideChart
            }),
        }
    };

    let mut solver = Dopri5::new(rhs, init.s, [init.x, init.z, init.theta], cfg)
        .map_err(|_| IntegrateError::BadInit { x: init.x })?;

    let s_end = init.s + budget.max_arc;
    let wall_kind = if space.kappa() < 0.0 {
        EventKind::WallApproach
    } else {
        EventKind::EscapeXMax
    };
    let x_stop = budget.x_max.min(space.x_sup() * WALL_FRACTION);

    let mut traj = Trajectory {
        samples: vec![init],
        events: Vec::new(),
    };
    let mut counters = EventCounters { y0: 0, omega: 0 };
    let mut cursor = opts.sample_every.map(|ds| UniformCursor {
        next: init.s + ds,
        stride: ds,
    });

    loop {
        if solver.s() >= s_end {
            let st = state_of(solver.s(), solver.y());
            push_final(&mut traj, st, EventKind::StallBudget);
            return Ok(traj);
        }
        let dtheta = solver.dy()[2].abs();
        if dtheta > 1e-12 {
            solver.limit_next_step(THETA_STEP_CAP / dtheta);
        }

        let step = match solver.step_toward(s_end) {
            Ok(step) => step,
            Err(CoreError::StepUnderflow { s, y, issue }) => {
                let st = AngularState::new(s, y[0], y[1], y[2]);
                // Throttled against the axis: finish by series extrapolation.
                let approaching = st.x < 10.0 * AXIS_PROX
                    && angular_field(space, h, st.x, st.theta).is_some_and(|(dx, _, _)| dx < 0.0);
                if approaching {
                    let contact = extrapolate_axis_contact(space, h, &st)?;
                    push_final(&mut traj, contact, EventKind::AxisContact);
                    return Ok(traj);
                }
                if issue == Some(FieldIssue::AxisSingular) || st.x < X_FLOOR {
                    return Err(IntegrateError::Geometry { s, x: st.x });
                }
                return Err(IntegrateError::Stiffness {
                    s,
                    x: st.x,
                    z: st.z,
                    theta: st.theta,
                });
            }
            Err(CoreError::MaxStepsExceeded { s }) => {
                return Err(IntegrateError::TooManySteps { s })
            }
            Err(CoreError::BadInitialState { s, .. }) => {
                return Err(IntegrateError::TooManySteps { s })
            }
        };

        // Locate events inside the step, earliest first.
        let mut found: Vec<(f64, EventKind)> = Vec::new();
        scan_trig_events(&step, x_stop, wall_kind, &mut found);
        found.sort_by(|a, b| a.0.total_cmp(&b.0));

        for (s_star, kind) in found {
            let y_star = step.eval(s_star);
            let st = state_of(s_star, &y_star);
            let kind = match kind {
                // A sin θ zero at small x is the axis, not Ω.
                EventKind::OmegaPlus | EventKind::OmegaMinus if st.x < AXIS_EVENT_XTOL => {
                    EventKind::AxisContact
                }
                k => k,
            };
            let stop_now = match kind {
                EventKind::Y0Crossing => {
                    counters.y0 += 1;
                    traj.events.push(Event {
                        kind,
                        s: s_star,
                        state: st,
                    });
                    // Poincaré section θ ≡ π/2 (mod 2π).
                    if let Some(pc) = &stop.period_closure {
                        if st.theta.sin() > 0.0 && s_star - init.s >= pc.min_arc {
                            let d = (st.x - pc.x_ref)
                                .abs()
                                .max((st.nu(space) - pc.nu_ref).abs());
                            if d < pc.tol {
                                emit_uniform(&mut traj, &step, &mut cursor, s_star);
                                push_final(&mut traj, st, EventKind::PeriodClosure);
                                return Ok(traj);
                            }
                        }
                    }
                    stop.y0_crossings == Some(counters.y0)
                }
                EventKind::OmegaPlus | EventKind::OmegaMinus => {
                    counters.omega += 1;
                    traj.events.push(Event {
                        kind,
                        s: s_star,
                        state: st,
                    });
                    stop.omega_contacts == Some(counters.omega)
                }
                EventKind::AxisContact => true,
                EventKind::WallApproach | EventKind::EscapeXMax => true,
                _ => false,
            };
            if stop_now {
                match kind {
                    EventKind::AxisContact | EventKind::WallApproach | EventKind::EscapeXMax => {
                        emit_uniform(&mut traj, &step, &mut cursor, s_star);
                        push_final(&mut traj, st, kind);
                    }
                    _ => {
                        emit_uniform(&mut traj, &step, &mut cursor, s_star);
                        if traj.samples.last().map(|p| p.s) != Some(st.s) {
                            traj.samples.push(st);
                        }
                    }
                }
                return Ok(traj);
            }
            if traj.events.len() >= budget.max_events {
                emit_uniform(&mut traj, &step, &mut cursor, s_star);
                push_final(&mut traj, st, EventKind::StallBudget);
                return Ok(traj);
            }
        }

        // Record samples for the whole step.
        emit_uniform(&mut traj, &step, &mut cursor, step.s1());
        let st1 = state_of(solver.s(), solver.y());
        if cursor.is_none() {
            traj.samples.push(st1);
        }

        // Axis-contact proximity: |ν| → 1 forces x → 0 together with sin θ → 0,
        // so finish by series extrapolation instead of stepping into x ≤ 0.
        if st1.x < AXIS_PROX {
            let dx = solver.dy()[0];
            if dx < 0.0 {
                let contact = extrapolate_axis_contact(space, h, &st1)?;
                push_final(&mut traj, contact, EventKind::AxisContact);
                return Ok(traj);
            }
        }
        if st1.x < X_FLOOR {
            return Err(IntegrateError::Geometry { s: st1.s, x: st1.x });
        }
    }
}

fn state_of(s: f64, y: &[f64; 3]) -> AngularState {
    AngularState::new(s, y[0], y[1], y[2])
}

#[derive(Debug, Clone, Copy)]
struct UniformCursor {
    next: f64,
    stride: f64,
}

fn emit_uniform(
    traj: &mut Trajectory,
    step: &DenseStep<3>,
    cursor: &mut Option<UniformCursor>,
    s_limit: f64,
) {
    let Some(c) = cursor.as_mut() else { return };
    let hi = s_limit.min(step.s1());
    while c.next <= hi + 1e-15 {
        if c.next >= step.s0 - 1e-15 {
            let s = c.next.min(step.s1());
            let y = step.eval(s);
            traj.samples.push(state_of(c.next, &y));
        }
        c.next += c.stride;
    }
}

fn push_final(traj: &mut Trajectory, st: AngularState, kind: EventKind) {
    traj.events.push(Event {
        kind,
        s: st.s,
        state: st,
    });
    if traj
        .samples
        .last()
        .map(|p| (p.s - st.s).abs() > 1e-15)
        .unwrap_or(true)
    {
        traj.samples.push(st);
    }
}

/// Zeros of cos θ (Y0), sin θ (Ω or axis) and x − x_stop inside one step.
fn scan_trig_events(
    step: &DenseStep<3>,
    x_stop: f64,
    wall_kind: EventKind,
    found: &mut Vec<(f64, EventKind)>,
) {
    let (s0, s1) = (step.s0, step.s1());
    let probe = s0 + 1e-3 * (s1 - s0);

    let g_cos = |s: f64| step.eval(s)[2].cos();
    let mut g0 = g_cos(s0);
    if g0.abs() < EVENT_TOL {
        g0 = g_cos(probe);
    }
    let g1 = g_cos(s1);
    if g0 != 0.0 && g0 * g1 < 0.0 {
        let s_star = bisect_on(g_cos, s0, s1, g0, EVENT_TOL);
        found.push((s_star, EventKind::Y0Crossing));
    }

    let g_sin = |s: f64| step.eval(s)[2].sin();
    let mut h0 = g_sin(s0);
    if h0.abs() < EVENT_TOL {
        h0 = g_sin(probe);
    }
    let h1 = g_sin(s1);
    if h0 != 0.0 && h0 * h1 < 0.0 {
        let s_star = bisect_on(g_sin, s0, s1, h0, EVENT_TOL);
        let kind = if step.eval(s_star)[2].cos() > 0.0 {
            EventKind::OmegaPlus
        } else {
            EventKind::OmegaMinus
        };
        found.push((s_star, kind));
    }

    let g_x = |s: f64| step.eval(s)[0] - x_stop;
    let mut w0 = g_x(s0);
    if w0.abs() < EVENT_TOL * x_stop.max(1.0) {
        w0 = g_x(probe);
    }
    let w1 = g_x(s1);
    if w0 < 0.0 && w1 >= 0.0 {
        let s_star = bisect_on(g_x, s0, s1, w0, EVENT_TOL * x_stop.max(1.0));
        found.push((s_star, wall_kind));
    }
}

/// Finish a trajectory that has entered the axis-proximity band: the contact
/// instant is the root of the local series x(s) ≈ x₁ + x′Δ + ½x″Δ².
fn extrapolate_axis_contact(
    space: &AmbientSpace,
    h: &PrescribedH,
    st: &AngularState,
) -> Result<AngularState, IntegrateError> {
    let (dx, dz, dtheta) = rhs_angular(space, h, st)?;
    let (ddx, ddz) = angular_second_derivs(space, h, st)?;
    let delta = smallest_positive_root(0.5 * ddx, dx, st.x)
        .ok_or(IntegrateError::Geometry { s: st.s, x: st.x })?;
    let z = st.z + dz * delta + 0.5 * ddz * delta * delta;
    let theta = st.theta + dtheta * delta;
    Ok(AngularState::new(st.s + delta, 0.0, z, theta))
}

/// Smallest positive root of a·t² + b·t + c = 0 (b < 0 expected, c > 0).
fn smallest_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    if a.abs() < 1e-30 {
        let t = -c / b;
        return (t.is_finite() && t > 0.0).then_some(t);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        let t = -c / b;
        return (t.is_finite() && t > 0.0).then_some(t);
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = [q / a, c / q];
    roots.sort_by(f64::total_cmp);
    roots.into_iter().find(|t| t.is_finite() && *t > 0.0)
}

/// Numerically computed linearization entry of the phase field at an
/// equilibrium: the coefficient F in u″ = F·u for radial perturbations.
/// Negative for admissible data (the equilibrium is a center, so nearby
/// orbits are closed rather than spiraling).
pub fn equilibrium_linearization(space: &AmbientSpace, h: &PrescribedH, eps: Eps) -> Option<f64> {
    let e = crate::phaseplane::equilibrium(space, h, eps)?;
    let probe = 1e-6 * e.x;
    let dy_at = |x: f64| {
        rhs_phase(space, h, &PhaseState { x, y: 0.0, eps })
            .map(|(_, dy)| dy)
            .ok()
    };
    let plus = dy_at(e.x + probe)?;
    let minus = dy_at(e.x - probe)?;
    Some((plus - minus) / (2.0 * probe))
}

/// Cutoffs below which the arc-length mean-curvature formula loses digits to
/// cancellation (denominator ∝ x·|sin θ|).
const RESIDUAL_SIN_CUTOFF: f64 = 1e-3;
const RESIDUAL_X_CUTOFF: f64 = 1e-3;

/// |H − 𝔥(ν)| at one state, with H from the arc-length mean-curvature
/// formula and x′, x″ reconstructed from the vector field. `None` within the
/// cancellation cutoffs of Ω contacts and the axis.
pub fn curvature_residual_at(
    space: &AmbientSpace,
    h: &PrescribedH,
    st: &AngularState,
) -> Option<f64> {
    if st.theta.sin().abs() < RESIDUAL_SIN_CUTOFF || st.x < RESIDUAL_X_CUTOFF {
        return None;
    }
    Some(curvature_residual_raw(space, h, st))
}

/// Same as [`curvature_residual_at`] without the cutoff guard; may be noisy
/// or non-finite near Ω contacts.
pub fn curvature_residual_raw(space: &AmbientSpace, h: &PrescribedH, st: &AngularState) -> f64 {
    let Ok((dx, _dz, _dt)) = rhs_angular(space, h, st) else {
        return f64::NAN;
    };
    let Ok((ddx, _)) = angular_second_derivs(space, h, st) else {
        return f64::NAN;
    };
    let (kappa, tau) = (space.kappa(), space.tau());
    let x = st.x;
    let one_t2x2 = 1.0 + tau * tau * x * x;
    let q = 4.0 + kappa * x * x;
    let num = x * (-ddx * q * one_t2x2 + x * dx * dx * (kappa - 8.0 * tau * tau) - kappa * x)
        - 4.0 * dx * dx
        + 4.0;
    // 1 − x′²(1 + τ²x²) = sin²θ exactly along the angular field.
    let den = 4.0 * x * st.theta.sin().abs();
    let eps = st.eps().sign();
    let mean_curv = eps * num / (2.0 * den);
    let nu = st.nu(space);
    (mean_curv - h.eval_clamped(nu)).abs()
}

/// Maximum curvature residual over a trajectory's samples (cutoff-guarded).
/// NaN when no sample is outside the cutoffs.
pub fn curvature_residual(space: &AmbientSpace, h: &PrescribedH, traj: &Trajectory) -> f64 {
    let mut max: Option<f64> = None;
    for st in &traj.samples {
        if let Some(r) = curvature_residual_at(space, h, st) {
            max = Some(max.map_or(r, |m| m.max(r)));
        }
    }
    max.unwrap_or(f64::NAN)
}

/// Max deviation of (1 + τ²x²)x′² + (4 + κx²)²/16·z′² from 1 along the
/// trajectory, with x′, z′ from the vector field.
pub fn arc_identity_residual(space: &AmbientSpace, h: &PrescribedH, traj: &Trajectory) -> f64 {
    let (kappa, tau) = (space.kappa(), space.tau());
    let mut worst = 0.0f64;
    for st in &traj.samples {
        if let Ok((dx, dz, _)) = rhs_angular(space, h, st) {
            let gxx = 1.0 + tau * tau * st.x * st.x;
            let q = 4.0 + kappa * st.x * st.x;
            let lhs = gxx * dx * dx + q * q / 16.0 * dz * dz;
            worst = worst.max((lhs - 1.0).abs());
        }
    }
    worst
}

/// Max deviation between the angular field's dν/ds and the phase field's y′
/// at trajectory samples away from Ω contacts.
pub fn phase_consistency_residual(space: &AmbientSpace, h: &PrescribedH, traj: &Trajectory) -> f64 {
    let mut worst = 0.0f64;
    for st in &traj.samples {
        if st.theta.sin().abs() < 1e-3 || st.x < 1e-3 {
            continue;
        }
        let Ok((ddx, _)) = angular_second_derivs(space, h, st) else {
            continue;
        };
        let ps = st.phase_state(space);
        if let Ok((_, dy)) = rhs_phase(space, h, &ps) {
            worst = worst.max((ddx - dy).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn euclid() -> AmbientSpace {
        AmbientSpace::space_form_limit(0.0, 0.0).unwrap()
    }

    fn h1() -> PrescribedH {
        PrescribedH::constant(1.0)
    }

    #[test]
    fn angular_field_examples() {
        let (dx, dz, dt) = rhs_angular(
            &euclid(),
            &h1(),
            &AngularState::new(0.0, 1.0, 0.0, PI / 2.0),
        )
        .unwrap();
        assert!(dx.abs() < 1e-16);
        assert_relative_eq!(dz, 1.0);
        assert_relative_eq!(dt, 1.0);

        // e_{-1} of the Berger sphere is stationary in x and theta.
        let berger = AmbientSpace::new(4.0, 0.5).unwrap();
        let x_eq = 2.0f64.sqrt() + 1.0;
        let (dx, dz, dt) =
            rhs_angular(&berger, &h1(), &AngularState::new(0.0, x_eq, 0.0, 1.5 * PI)).unwrap();
        assert!(dx.abs() < 1e-15);
        assert!(dt.abs() < 1e-13, "dtheta = {dt}");
        assert!(dz < 0.0);
    }

    #[test]
    fn unit_circle_solves_the_euclidean_system() {
        // x = sin s, z = 1 - cos s, theta = s.
        let space = euclid();
        let h = h1();
        for j in 1..40 {
            let s = 0.07 * j as f64;
            if s.sin() <= 0.05 {
                continue;
            }
            let st = AngularState::new(s, s.sin(), 1.0 - s.cos(), s);
            let (dx, dz, dt) = rhs_angular(&space, &h, &st).unwrap();
            assert_relative_eq!(dx, s.cos(), epsilon = 1e-14);
            assert_relative_eq!(dz, s.sin(), epsilon = 1e-14);
            assert_relative_eq!(dt, 1.0, epsilon = 1e-12);

            // Phase projection: dy = -sin s along the circle.
            let ps = st.phase_state(&space);
            let (pdx, pdy) = rhs_phase(&space, &h, &ps).unwrap();
            assert_relative_eq!(pdx, s.cos(), epsilon = 1e-12);
            assert_relative_eq!(pdy, -s.sin(), epsilon = 1e-10);
        }
    }

    #[test]
    fn phase_field_axis_values() {
        let space = euclid();
        let h = h1();
        // Equilibrium at x = 1/(2 h(0)) = 0.5.
        let (dx, dy) = rhs_phase(
            &space,
            &h,
            &PhaseState {
                x: 0.5,
                y: 0.0,
                eps: Eps::Plus,
            },
        )
        .unwrap();
        assert_eq!(dx, 0.0);
        assert!(dy.abs() < 1e-15);

        let (_, dy) = rhs_phase(
            &space,
            &h,
            &PhaseState {
                x: 0.2,
                y: 0.0,
                eps: Eps::Plus,
            },
        )
        .unwrap();
        assert_relative_eq!(dy, 3.0, epsilon = 1e-14);

        assert!(rhs_phase(
            &space,
            &h,
            &PhaseState {
                x: 0.5,
                y: 1.1,
                eps: Eps::Plus
            }
        )
        .is_err());
    }

    #[test]
    fn euclidean_sphere_shooting_oracle() {
        let space = euclid();
        let h = h1();
        let init = axis_start(&space, &h, Orientation::Up, DEFAULT_AXIS_SEED);
        let budget = Budget::for_space(&space);
        let traj = integrate(
            &space,
            &h,
            init,
            &StopSpec::at_axis_contact(),
            &budget,
            &IntegrateOpts::default(),
        )
        .unwrap();

        let contact = traj.first_event(EventKind::AxisContact).unwrap();
        assert_relative_eq!(contact.state.z, 2.0, epsilon = 1e-8);
        assert_relative_eq!(contact.s, PI, epsilon = 1e-6);

        let y0 = traj.first_event(EventKind::Y0Crossing).unwrap();
        assert_relative_eq!(y0.state.x, 1.0, epsilon = 1e-9);
        assert_relative_eq!(y0.state.z, 1.0, epsilon = 1e-9);

        assert!(curvature_residual(&space, &h, &traj) < 1e-9);
        assert!(arc_identity_residual(&space, &h, &traj) < 1e-12);
        assert!(phase_consistency_residual(&space, &h, &traj) < 1e-10);
    }

    #[test]
    fn cylinder_orbit_is_stationary() {
        let space = AmbientSpace::new(-1.0, 1.0).unwrap();
        let h = h1();
        let e0 = crate::phaseplane::equilibrium(&space, &h, Eps::Plus).unwrap();
        let init = AngularState::new(0.0, e0.x, 0.0, PI / 2.0);
        let budget = Budget::for_space(&space).with_arc(10.0);
        let traj = integrate(
            &space,
            &h,
            init,
            &StopSpec::budget_only(),
            &budget,
            &IntegrateOpts::default(),
        )
        .unwrap();
        for st in &traj.samples {
            assert!((st.x - e0.x).abs() < 1e-10, "x drifted to {}", st.x);
        }
        assert!(traj.arc_length() >= 10.0 - 1e-9);
        assert!(curvature_residual(&space, &h, &traj) < 1e-12);
    }

    #[test]
    fn axis_seed_halving_converges() {
        // Nil3: tau > 0 exercises the beta = h(1)^2 + tau^2 series term.
        let space = AmbientSpace::new(0.0, 1.0).unwrap();
        let h = h1();
        let budget = Budget::for_space(&space).with_arc(0.2);
        let mut finals = Vec::new();
        for seed in [1e-5, 1e-6] {
            let init = axis_start(&space, &h, Orientation::Up, seed);
            let traj = integrate(
                &space,
                &h,
                init,
                &StopSpec::budget_only(),
                &budget.with_arc(0.1 - init.s),
                &IntegrateOpts::default(),
            )
            .unwrap();
            let f = traj.final_state();
            assert_relative_eq!(f.s, 0.1, epsilon = 1e-12);
            finals.push((f.x, f.z, f.theta));
        }
        let (a, b) = (finals[0], finals[1]);
        assert!((a.0 - b.0).abs() < 1e-8, "x mismatch: {} vs {}", a.0, b.0);
        assert!((a.1 - b.1).abs() < 1e-8);
        assert!((a.2 - b.2).abs() < 1e-8);
    }

    #[test]
    fn nodoid_event_order_in_nil() {
        let space = AmbientSpace::new(0.0, 1.0).unwrap();
        let h = h1();
        // Outer seed right of the sphere separatrix.
        let init = AngularState::new(0.0, 1.6, 0.0, PI / 2.0);
        let budget = Budget::for_space(&space);
        let traj = integrate(
            &space,
            &h,
            init,
            &StopSpec::after_omega(2),
            &budget,
            &IntegrateOpts::default(),
        )
        .unwrap();
        let kinds: Vec<EventKind> = traj.events.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EventKind::OmegaMinus,
                EventKind::Y0Crossing,
                EventKind::OmegaPlus
            ]
        );
        let om = traj.first_event(EventKind::OmegaMinus).unwrap();
        let op = traj.first_event(EventKind::OmegaPlus).unwrap();
        assert!(
            op.state.z < om.state.z,
            "z must decrease on the lower sheet"
        );
        assert_relative_eq!(om.state.x, op.state.x, epsilon = 1e-8);

        // Omega contacts carry |nu|·sqrt(1+tau^2 x^2) = 1.
        for e in [om, op] {
            let t = space.tau();
            let v = e.state.nu(&space).abs() * (1.0 + t * t * e.state.x * e.state.x).sqrt();
            assert_relative_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn orbit_retraces_under_reflection() {
        // Run forward, reflect the endpoint (theta -> pi - theta), run
        // forward again: the second integration must retrace the first.
        let space = AmbientSpace::new(-1.0, 1.0).unwrap();
        let h = h1();
        let init = AngularState::new(0.0, 1.2, 0.0, PI / 2.0);
        let budget = Budget::for_space(&space).with_arc(3.0);
        let opts = IntegrateOpts {
            sample_every: Some(0.05),
            ..Default::default()
        };
        let fwd = integrate(&space, &h, init, &StopSpec::budget_only(), &budget, &opts).unwrap();
        let end = fwd.final_state();
        let reflected = AngularState::new(0.0, end.x, 0.0, PI - end.theta);
        let back = integrate(
            &space,
            &h,
            reflected,
            &StopSpec::budget_only(),
            &budget,
            &opts,
        )
        .unwrap();
        let on_grid = |st: &AngularState| {
            let k = (st.s / 0.05).round();
            ((st.s - k * 0.05).abs() < 1e-9).then_some((k as i64, *st))
        };
        let bgrid: std::collections::HashMap<i64, AngularState> =
            back.samples.iter().filter_map(on_grid).collect();
        let mut matched = 0;
        for (k, f) in fwd.samples.iter().filter_map(on_grid) {
            let Some(b) = bgrid.get(&(60 - k)) else {
                continue;
            };
            assert!((f.x - b.x).abs() < 1e-8);
            assert!((f.nu(&space) + b.nu(&space)).abs() < 1e-8);
            assert!(((end.z - f.z) - b.z).abs() < 1e-8);
            matched += 1;
        }
        assert!(matched >= 59, "only {matched} grid points matched");

        // The backward direction itself: a backward run from the endpoint
        // must land on the initial state.
        let bwd = integrate(
            &space,
            &h,
            end,
            &StopSpec::budget_only(),
            &budget,
            &opts.backward(),
        )
        .unwrap();
        let start = bwd.initial_state();
        assert!((start.s - init.s).abs() < 1e-9);
        assert!((start.x - init.x).abs() < 1e-8);
        assert!((start.z - init.z).abs() < 1e-8);
    }

    #[test]
    fn equilibrium_linearization_is_negative() {
        // No closed form is asserted for F(kappa, tau, h(0)); only its sign.
        // Euclidean limit: F = -4 H0^2 exactly.
        let h = h1();
        let f = equilibrium_linearization(&euclid(), &h, Eps::Plus).unwrap();
        assert_relative_eq!(f, -4.0, max_relative = 1e-5);
        for (kappa, tau) in [(-1.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (4.0, 0.5)] {
            let space = AmbientSpace::new(kappa, tau).unwrap();
            let f = equilibrium_linearization(&space, &h, Eps::Plus).unwrap();
            assert!(f < 0.0, "F = {f} at ({kappa}, {tau})");
            if kappa > 0.0 {
                let f = equilibrium_linearization(&space, &h, Eps::Minus).unwrap();
                assert!(f < 0.0, "F_- = {f} at ({kappa}, {tau})");
            }
        }
    }

    #[test]
    fn orbits_stay_bounded() {
        // kappa <= 0: x cannot approach the wall / diverge within the budget.
        let h = h1();
        for space in [
            AmbientSpace::new(-1.0, 0.0).unwrap(),
            AmbientSpace::new(-1.0, 1.0).unwrap(),
            AmbientSpace::new(0.0, 1.0).unwrap(),
        ] {
            let init = AngularState::new(0.0, 1.3, 0.0, PI / 2.0);
            let budget = Budget::for_space(&space).with_arc(60.0);
            let traj = integrate(
                &space,
                &h,
                init,
                &StopSpec::budget_only(),
                &budget,
                &IntegrateOpts::default(),
            )
            .unwrap();
            assert!(traj.first_event(EventKind::WallApproach).is_none());
            assert!(traj.first_event(EventKind::EscapeXMax).is_none());
            assert_eq!(traj.events.last().unwrap().kind, EventKind::StallBudget);
        }
    }

    #[test]
    fn nodoid_events_agree_across_tolerances() {
        let space = AmbientSpace::new(0.0, 1.0).unwrap();
        let h = h1();
        let init = AngularState::new(0.0, 1.6, 0.0, PI / 2.0);
        let budget = Budget::for_space(&space);
        let mut results = Vec::new();
        for rtol in [1e-10, 1e-8] {
            let opts = IntegrateOpts {
                rtol,
                atol: rtol * 1e-2,
                ..Default::default()
            };
            let traj =
                integrate(&space, &h, init, &StopSpec::after_omega(2), &budget, &opts).unwrap();
            let omega = traj.first_event(EventKind::OmegaMinus).unwrap().state;
            let inner = traj.first_event(EventKind::Y0Crossing).unwrap().state;
            results.push((omega.x, omega.z, inner.x));
        }
        let (a, b) = (results[0], results[1]);
        assert!((a.0 - b.0).abs() < 1e-7);
        assert!((a.1 - b.1).abs() < 1e-7);
        assert!((a.2 - b.2).abs() < 1e-7);
    }

    #[test]
    fn trajectory_budget_stops_cleanly() {
        let space = AmbientSpace::new(4.0, 0.5).unwrap();
        let h = h1();
        // Seed on the axis side in Theta_{-1}: orbit of nodoid type.
        let init = AngularState::new(0.0, 0.3, 0.0, 1.5 * PI);
        let budget = Budget::for_space(&space).with_arc(0.001);
        let traj = integrate(
            &space,
            &h,
            init,
            &StopSpec::budget_only(),
            &budget,
            &IntegrateOpts::default(),
        )
        .unwrap();
        assert_eq!(traj.events.last().unwrap().kind, EventKind::StallBudget);
        assert_relative_eq!(traj.final_state().s, 0.001, epsilon = 1e-12);
    }
}
