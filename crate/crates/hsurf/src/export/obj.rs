//! Surfaces of revolution as triangle meshes with OBJ output.
//!
//! A profile polyline (x(t), z(t)) in the half plane is revolved around the
//! vertical axis: vertex (x cos φ, x sin φ, z). Profiles ending on the axis
//! are capped with pole vertices (sphere topology), closed profiles wrap
//! around (torus topology), anything else becomes an open tube.

use crate::ambient::AmbientSpace;
use std::collections::HashSet;
use std::io::{self, Write};

/// x below this is treated as "on the axis" for capping.
const AXIS_TOL: f64 = 1e-4;
/// Endpoint distance below which a profile counts as closed.
const CLOSE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Open,
    Closed,
    AxisCapped,
}

#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
}

pub fn detect_profile_kind(profile: &[(f64, f64)]) -> ProfileKind {
    let first = profile.first().copied().unwrap_or((0.0, 0.0));
    let last = profile.last().copied().unwrap_or((0.0, 0.0));
    if first.0 < AXIS_TOL && last.0 < AXIS_TOL {
        ProfileKind::AxisCapped
    } else if (first.0 - last.0).abs() < CLOSE_TOL && (first.1 - last.1).abs() < CLOSE_TOL {
        ProfileKind::Closed
    } else {
        ProfileKind::Open
    }
}

/// Revolve a profile with `segments` angular subdivisions. The topology is
/// detected from the endpoints; see [`detect_profile_kind`].
pub fn revolve_profile(profile: &[(f64, f64)], segments: usize) -> Result<Mesh, String> {
    if profile.len() < 2 {
        return Err("profile needs at least two points".to_string());
    }
    if segments < 3 {
        return Err("angular resolution must be at least 3".to_string());
    }
    let kind = detect_profile_kind(profile);

    // Interior rows exclude axis endpoints (they become pole vertices) and
    // the duplicated closing point.
    let rows: Vec<(f64, f64)> = match kind {
        ProfileKind::AxisCapped => profile[1..profile.len() - 1]
            .iter()
            .copied()
            .filter(|p| p.0 >= AXIS_TOL)
            .collect(),
        ProfileKind::Closed => profile[..profile.len() - 1].to_vec(),
        ProfileKind::Open => profile.to_vec(),
    };
    if rows.len() < 2 {
        return Err("profile too short after trimming axis endpoints".to_string());
    }

    let mut mesh = Mesh::default();
    let n = segments as u32;
    for (x, z) in &rows {
        for j in 0..segments {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / segments as f64;
            mesh.vertices.push([x * phi.cos(), x * phi.sin(), *z]);
        }
    }
    let ring = |r: u32, j: u32| r * n + (j % n);

    let band_count = match kind {
        ProfileKind::Closed => rows.len(),
        _ => rows.len() - 1,
    };
    for r in 0..band_count as u32 {
        let r1 = (r + 1) % rows.len() as u32;
        for j in 0..n {
            let a = ring(r, j);
            let b = ring(r, j + 1);
            let c = ring(r1, j);
            let d = ring(r1, j + 1);
            mesh.faces.push([a, d, b]);
            mesh.faces.push([a, c, d]);
        }
    }

    if kind == ProfileKind::AxisCapped {
        let bottom = mesh.vertices.len() as u32;
        mesh.vertices.push([0.0, 0.0, profile.first().unwrap().1]);
        let top = mesh.vertices.len() as u32;
        mesh.vertices.push([0.0, 0.0, profile.last().unwrap().1]);
        let last_row = rows.len() as u32 - 1;
        for j in 0..n {
            mesh.faces.push([bottom, ring(0, j), ring(0, j + 1)]);
            mesh.faces
                .push([top, ring(last_row, j + 1), ring(last_row, j)]);
        }
    }
    Ok(mesh)
}

/// V − E + F with edges counted once.
pub fn euler_characteristic(mesh: &Mesh) -> i64 {
    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    for f in &mesh.faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let key = (a.min(b), a.max(b));
            edges.insert(key);
        }
    }
    mesh.vertices.len() as i64 - edges.len() as i64 + mesh.faces.len() as i64
}

/// Write Wavefront OBJ. With `berger` set, each vertex line is followed by a
/// comment carrying its four ℂ² coordinates under the Berger embedding.
pub fn write_obj<W: Write>(
    w: &mut W,
    mesh: &Mesh,
    berger: Option<&AmbientSpace>,
) -> io::Result<()> {
    writeln!(
        w,
        "# surface of revolution: {} vertices, {} faces",
        mesh.vertex_count(),
        mesh.face_count()
    )?;
    for v in &mesh.vertices {
        writeln!(w, "v {:.12e} {:.12e} {:.12e}", v[0], v[1], v[2])?;
        if let Some(space) = berger {
            if let Ok(c) = space.berger_embed(*v) {
                writeln!(
                    w,
                    "# v4 {:.12e} {:.12e} {:.12e} {:.12e}",
                    c[0], c[1], c[2], c[3]
                )?;
            }
        }
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_profile(n: usize) -> Vec<(f64, f64)> {
        // Half circle from pole to pole: sphere topology.
        (0..=n)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / n as f64;
                (t.sin(), 1.0 - t.cos())
            })
            .collect()
    }

    #[test]
    fn sphere_mesh_has_euler_characteristic_two() {
        let mesh = revolve_profile(&circle_profile(48), 32).unwrap();
        assert_eq!(euler_characteristic(&mesh), 2);
    }

    #[test]
    fn torus_mesh_has_euler_characteristic_zero() {
        let n = 64;
        let profile: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (2.0 + 0.5 * t.cos(), 0.5 * t.sin())
            })
            .collect();
        let mesh = revolve_profile(&profile, 24).unwrap();
        assert_eq!(detect_profile_kind(&profile), ProfileKind::Closed);
        assert_eq!(euler_characteristic(&mesh), 0);
    }

    #[test]
    fn open_tube_has_boundary() {
        let profile = vec![(1.0, 0.0), (1.0, 0.5), (1.0, 1.0)];
        assert_eq!(detect_profile_kind(&profile), ProfileKind::Open);
        let mesh = revolve_profile(&profile, 16).unwrap();
        // Disk topology would be 1; a tube (annulus) gives 0 with two
        // boundary circles and no caps.
        assert_eq!(euler_characteristic(&mesh), 0);
        assert_eq!(mesh.vertex_count(), 3 * 16);
    }

    #[test]
    fn obj_output_shape() {
        let mesh = revolve_profile(&circle_profile(8), 8).unwrap();
        let mut buf = Vec::new();
        write_obj(&mut buf, &mesh, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().filter(|l| l.starts_with("v ")).count(),
            mesh.vertex_count()
        );
        assert_eq!(
            text.lines().filter(|l| l.starts_with("f ")).count(),
            mesh.face_count()
        );
    }
}
