//! Rotational surfaces of prescribed mean curvature in the homogeneous
//! 3-spaces E(κ, τ).
//!
//! A surface has prescribed mean curvature 𝔥 ∈ C¹([−1, 1]) when its mean
//! curvature at every point equals 𝔥(ν), with ν the angle function (inner
//! product of the unit normal with the vertical Killing field). For even,
//! positive 𝔥 with 4𝔥² + κ(1 − y²) > 0 the complete rotational examples form
//! a Delaunay-type family — cylinder, sphere, unduloids, nodoids plus two
//! torus phenomena for κ > 0 — and for κ ≤ 0, τ > 0 rotational tori exist
//! exactly when a height gap over a nodoid arc vanishes. This crate builds
//! all of these numerically:
//!
//! - [`ambient`]: the spaces E(κ, τ), their coordinate model and metric, and
//!   the Berger-sphere embedding into ℂ².
//! - [`prescribed`]: prescribed functions 𝔥 (constant, table, step family),
//!   admissibility validation.
//! - [`phaseplane`]: closed-form nullclines Γ_ε, equilibria, monotonicity
//!   regions of the profile phase plane.
//! - [`integrate`]: adaptive Dormand–Prince 5(4) integration of profile
//!   curves with dense-output event detection (Ω contacts, axis contacts,
//!   y = 0 crossings, Poincaré returns).
//! - [`classify`]: constructive Delaunay classification from a seed —
//!   sphere shooting, unduloid period closure, nodoid continuation, the
//!   S²×ℝ torus, and the Berger pole-orbit bisection.
//! - [`torus`]: the height-gap functional over nodoid arcs, the
//!   non-existence predicate, and the bisection for a closed-profile torus.
//! - [`config`], [`export`], [`cli`]: run configuration, CSV/SVG/OBJ/JSON
//!   emitters, and the `hsurf` command-line tool built on them.
//!
//! ## Quick start
//!
//! Shoot the rotational sphere for constant 𝔥 ≡ 1 in the Euclidean limit and
//! read off its equator radius:
//!
//! ```
//! use hsurf::ambient::AmbientSpace;
//! use hsurf::classify::{shoot_sphere, ClassifyOpts};
//! use hsurf::prescribed::PrescribedH;
//!
//! let space = AmbientSpace::space_form_limit(0.0, 0.0).unwrap();
//! let h = PrescribedH::constant(1.0);
//! let sphere = shoot_sphere(&space, &h, &ClassifyOpts::default()).unwrap();
//! assert!((sphere.r0 - 1.0).abs() < 1e-6);
//! assert!((sphere.height - 2.0).abs() < 1e-6);
//! ```
//!
//! ## Runnable examples
//!
//! ```text
//! examples/
//! ├── sphere_shooting.rs   # spheres across the five model geometries
//! ├── phase_portrait.rs    # SVG phase planes with nullclines and orbits
//! ├── unduloid_family.rs   # necksize sweep toward cylinder and sphere chain
//! ├── nodoid_profile.rs    # a nodoid profile with its event log, CSV export
//! ├── s2xr_torus.rs        # the rotational torus over the S² equator
//! ├── berger_pole.rs       # pole-orbit bisection in a Berger sphere
//! ├── torus_search.rs      # step-family bisection for a closed torus in Nil₃
//! └── mesh_export.rs       # revolved OBJ meshes of the basic surfaces
//! ```
//!
//! Run one with `cargo run --example sphere_shooting`. The thin `hsurf`
//! binary exposes the same functionality as subcommands (`validate`,
//! `classify`, `phase-plot`, `profile`, `mesh`, `torus-search`).

pub mod ambient;
pub mod classify;
pub mod cli;
pub mod config;
pub mod export;
pub mod integrate;
pub mod phaseplane;
pub mod prescribed;
pub mod torus;

pub use ambient::AmbientSpace;
pub use classify::SurfaceClass;
pub use config::RunConfig;
pub use integrate::{AngularState, Budget, IntegrateOpts, StopSpec, Trajectory};
pub use phaseplane::Eps;
pub use prescribed::PrescribedH;
