//! Deterministic exporters: trajectory CSV, phase-portrait SVG, revolved OBJ
//! meshes, and event sidecar JSON. Identical inputs produce byte-identical
//! output.

pub mod csv;
pub mod obj;
pub mod svg;

pub use csv::{events_json, trajectory_csv, write_trajectory_csv};
pub use obj::{euler_characteristic, revolve_profile, write_obj, Mesh, ProfileKind};
pub use svg::{render_phase_plot, PhasePlotOpts};
