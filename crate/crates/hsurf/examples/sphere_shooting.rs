//! Shoot the rotational sphere in each model geometry.
//!
//! The profile starts orthogonally on the axis, crosses y = 0 at the equator
//! radius r₀ and closes by the even symmetry. In the Euclidean limit
//! (admitted as a test oracle) the answer is the round sphere of radius
//! 1/H₀; in Berger spheres the height decides embeddedness against the
//! vertical period 8τπ/κ.

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{shoot_sphere, ClassifyOpts};
use hsurf::integrate::curvature_residual;
use hsurf::prescribed::PrescribedH;

fn main() {
    let opts = ClassifyOpts::default();

    println!("Euclidean limit (kappa = 0, tau = 0), constant h:");
    let euclid = AmbientSpace::space_form_limit(0.0, 0.0).unwrap();
    for h0 in [0.5, 1.0, 2.0] {
        let h = PrescribedH::constant(h0);
        let s = shoot_sphere(&euclid, &h, &opts).unwrap();
        println!(
            "  H0 = {h0}: r0 = {:.9} (exact {:.4}), height = {:.9} (exact {:.4})",
            s.r0,
            1.0 / h0,
            s.height,
            2.0 / h0
        );
    }

    println!("proper spaces, h = 1:");
    let spaces = [
        ("H2xR      ", AmbientSpace::new(-1.0, 0.0).unwrap()),
        ("SL2~(R)   ", AmbientSpace::new(-1.0, 1.0).unwrap()),
        ("Nil3      ", AmbientSpace::new(0.0, 1.0).unwrap()),
        ("S2xR      ", AmbientSpace::new(1.0, 0.0).unwrap()),
        ("Berger    ", AmbientSpace::new(4.0, 0.5).unwrap()),
    ];
    let h = PrescribedH::constant(1.0);
    for (name, space) in &spaces {
        let s = shoot_sphere(space, &h, &opts).unwrap();
        let residual = curvature_residual(space, &h, &s.profile);
        print!(
            "  {name} r0 = {:.9}, height = {:.9}, curvature residual = {:.1e}",
            s.r0, s.height, residual
        );
        if let Some(period) = space.vertical_period() {
            println!(", embedded: {} (period {:.6})", s.embedded, period);
        } else {
            println!();
        }
    }

    // A non-constant prescribed function: table over |nu|.
    let table = PrescribedH::table(&[(0.0, 1.0), (0.5, 1.2), (1.0, 1.5)]).unwrap();
    let nil = AmbientSpace::new(0.0, 1.0).unwrap();
    let s = shoot_sphere(&nil, &table, &opts).unwrap();
    println!(
        "Nil3 with table h: r0 = {:.9}, height = {:.9}",
        s.r0, s.height
    );
}
