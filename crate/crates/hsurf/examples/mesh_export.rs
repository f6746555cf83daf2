//! Revolve classified profiles into OBJ meshes.
//!
//! A sphere profile (axis endpoints) is capped with pole fans (Euler
//! characteristic 2), a closed torus profile wraps around (characteristic 0),
//! and a cylinder piece stays an open tube. Berger-sphere meshes can carry
//! the four ℂ² coordinates of each vertex as comment attributes.

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{build_cylinder, shoot_sphere, ClassifyOpts};
use hsurf::export::{euler_characteristic, revolve_profile, write_obj};
use hsurf::prescribed::PrescribedH;
use hsurf::torus::{find_torus, TorusOpts};
use std::fs;

fn main() -> std::io::Result<()> {
    let opts = ClassifyOpts::default();
    let h = PrescribedH::constant(1.0);
    fs::create_dir_all("out")?;

    // Sphere in a Berger space, with 4D coordinates attached.
    let berger = AmbientSpace::new(4.0, 0.5).unwrap();
    let sphere = shoot_sphere(&berger, &h, &opts).unwrap();
    let mesh = revolve_profile(&sphere.profile.profile_xz(), 96).unwrap();
    println!(
        "sphere mesh: {} vertices, {} faces, Euler characteristic {}",
        mesh.vertex_count(),
        mesh.face_count(),
        euler_characteristic(&mesh)
    );
    let mut buf = Vec::new();
    write_obj(&mut buf, &mesh, Some(&berger))?;
    fs::write("out/sphere_berger.obj", buf)?;

    // Open cylinder tube.
    let nil = AmbientSpace::new(0.0, 1.0).unwrap();
    let cyl = build_cylinder(&nil, &h, &opts).unwrap();
    let mesh = revolve_profile(&cyl.profile.profile_xz(), 48).unwrap();
    println!(
        "cylinder mesh: {} vertices, {} faces, Euler characteristic {}",
        mesh.vertex_count(),
        mesh.face_count(),
        euler_characteristic(&mesh)
    );
    let mut buf = Vec::new();
    write_obj(&mut buf, &mesh, None)?;
    fs::write("out/cylinder_nil.obj", buf)?;

    // Closed torus profile found by the step-family search in Nil3.
    let torus = find_torus(&nil, 1.0, 0.75, 0.05, &TorusOpts::default());
    match torus {
        Ok(t) => {
            let mesh = revolve_profile(&t.nodoid.profile.profile_xz(), 96).unwrap();
            println!(
                "torus mesh (lambda0 = {:.6}): {} vertices, {} faces, Euler characteristic {}",
                t.lambda0,
                mesh.vertex_count(),
                mesh.face_count(),
                euler_characteristic(&mesh)
            );
            let mut buf = Vec::new();
            write_obj(&mut buf, &mesh, None)?;
            fs::write("out/torus_nil.obj", buf)?;
        }
        Err(e) => println!("torus search failed: {e}"),
    }
    println!("wrote out/sphere_berger.obj, out/cylinder_nil.obj, out/torus_nil.obj");
    Ok(())
}
