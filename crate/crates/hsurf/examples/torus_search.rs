//! Locate a rotational torus in Nil₃ and in the universal cover of SL₂(ℝ).
//!
//! For any prescribed function that is non-increasing on [−1, 0] — constants
//! in particular — the height gap over a nodoid arc is strictly positive and
//! no rotational torus exists. Raising the inner plateau of the two-plateau
//! family drives the gap through zero; the bisection finds the crossing λ₀,
//! where the profile closes into an embedded torus.

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{trace_nodoid, ClassifyOpts};
use hsurf::prescribed::PrescribedH;
use hsurf::torus::{find_torus, nonexistence_check, torus_gap, TorusOpts};

fn main() {
    let opts = TorusOpts::default();
    let h0 = 1.0;
    let delta = 0.05;

    for (name, kappa) in [("Nil3", 0.0), ("SL2~(R)", -1.0)] {
        let space = AmbientSpace::new(kappa, 1.0).unwrap();
        println!("space {name} (kappa = {kappa}, tau = 1)");

        // The plateau edge nu0 comes from the Omega radius of a reference
        // nodoid with constant curvature h0.
        let constant = PrescribedH::constant(h0);
        let reference = trace_nodoid(&space, &constant, 1.4, &ClassifyOpts::default()).unwrap();
        let x1 = reference.omega_x;
        println!(
            "  reference nodoid seeded at 1.4: Omega contact at x1 = {:.6}",
            x1
        );

        let base = torus_gap(&space, &constant, x1, &opts).unwrap();
        println!(
            "  constant h = {h0}: gap = {:.6} > 0 (nonexistence_check: {})",
            base.gap,
            nonexistence_check(&constant)
        );

        match find_torus(&space, h0, x1, delta, &opts) {
            Ok(result) => {
                println!(
                    "  torus at lambda0 = {:.10} with |gap| = {:.2e}",
                    result.lambda0,
                    result.gap_at_lambda0.abs()
                );
                println!(
                    "  I1 = {:.8}, I2 = {:.8}, nu0 = {:.6}",
                    result.i1, result.i2, result.nu0
                );
                println!(
                    "  closed profile: closure residual = {:.2e}, radii ({:.4} > {:.4} > {:.4})",
                    result.nodoid.closure_residual,
                    result.nodoid.outer,
                    result.nodoid.omega_x,
                    result.nodoid.inner
                );
            }
            Err(e) => println!("  search failed: {e}"),
        }
    }
}
