//! The rotational torus of S²(κ)×ℝ.
//!
//! The profile starts on the equator fiber with vertical angle function,
//! bulges outward to x₁ > 2/√κ, returns to the equator with the opposite
//! orientation, and sweeps the inner (antipodal) side back to its start. The
//! inner radius is the antipodal image of the outer one: x₂ = 4/(κ x₁).

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{s2r_torus, ClassifyOpts};
use hsurf::prescribed::PrescribedH;

fn main() {
    let opts = ClassifyOpts::default();
    for kappa in [1.0, 4.0] {
        let space = AmbientSpace::new(kappa, 0.0).unwrap();
        let h = PrescribedH::constant(1.0);
        let t = s2r_torus(&space, &h, &opts).unwrap();
        let antipodal = 4.0 / (kappa * t.outer);
        println!("S2({kappa}) x R, h = 1:");
        println!("  equator radius 2/sqrt(kappa) = {:.6}", 2.0 / kappa.sqrt());
        println!("  outer radius x1 = {:.9}", t.outer);
        println!(
            "  inner radius x2 = {:.9} (antipodal 4/(kappa x1) = {:.9})",
            t.inner, antipodal
        );
        println!("  height = {:.9}", t.height);
        println!("  closure residual = {:.2e}", t.closure_residual);
    }
}
