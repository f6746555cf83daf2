//! Sweep the unduloid family by necksize.
//!
//! Necks just below the equilibrium radius give orbits hugging the cylinder;
//! necks near zero give profiles approaching a chain of tangent spheres. The
//! bulge radius moves monotonically between the two limits.

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{shoot_sphere, trace_unduloid, ClassifyOpts};
use hsurf::phaseplane::{equilibrium, Eps};
use hsurf::prescribed::PrescribedH;

fn main() {
    let space = AmbientSpace::space_form_limit(0.0, 0.0).unwrap();
    let h = PrescribedH::constant(1.0);
    let opts = ClassifyOpts::default();

    let e0 = equilibrium(&space, &h, Eps::Plus).unwrap().x;
    let r0 = shoot_sphere(&space, &h, &opts).unwrap().r0;
    println!("Euclidean limit, h = 1: e0 = {e0}, sphere equator r0 = {r0}");
    println!(
        "{:>12} {:>12} {:>12} {:>12}",
        "neck", "bulge", "arc period", "z pitch"
    );

    println!("neck -> e0 (cylinder limit):");
    for k in 1..=10 {
        let x0 = e0 * (1.0 - 0.5f64.powi(k));
        let u = trace_unduloid(&space, &h, x0, &opts).unwrap();
        println!(
            "{:>12.6} {:>12.8} {:>12.6} {:>12.6}",
            u.neck, u.bulge, u.arc_period, u.z_pitch
        );
    }

    println!("neck -> 0 (sphere-chain limit, bulge -> r0):");
    for k in 1..=10 {
        let x0 = e0 * 0.5f64.powi(k);
        let u = trace_unduloid(&space, &h, x0, &opts).unwrap();
        println!(
            "{:>12.6} {:>12.8} {:>12.6} {:>12.6}",
            u.neck, u.bulge, u.arc_period, u.z_pitch
        );
    }
}
