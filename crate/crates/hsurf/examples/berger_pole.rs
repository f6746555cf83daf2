//! Pole-orbit search in a Berger sphere.
//!
//! In Θ₋₁, axis seeds below the separatrix ξ₀ launch nodoid sweeps that hit
//! the boundary Ω, seeds between ξ₀ and the equilibrium e₋₁ close around it,
//! and ξ₀ itself runs off to x → ∞ both ways: its surface passes through the
//! pole of the antipodal fiber. The search bisects between the two outcomes
//! and classifies compactness from the height drift.

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{berger_pole_orbit, ClassifyOpts};
use hsurf::prescribed::PrescribedH;

fn main() {
    let space = AmbientSpace::new(4.0, 0.5).unwrap();
    let h = PrescribedH::constant(1.0);
    let opts = ClassifyOpts::default();

    println!("Berger sphere (kappa, tau) = (4, 0.5), h = 1");
    let e1 = hsurf::phaseplane::equilibrium(&space, &h, hsurf::Eps::Minus).unwrap();
    println!("  equilibrium e_-1 at x = {:.12} (exact sqrt(2)+1)", e1.x);

    match berger_pole_orbit(&space, &h, &opts) {
        Ok(info) => {
            println!("  separatrix seed xi0 = {:.10}", info.xi0);
            println!(
                "  bracket [{:.10}, {:.10}] (width {:.2e})",
                info.bracket.0,
                info.bracket.1,
                info.bracket.1 - info.bracket.0
            );
            println!("  height drift z0 - z1 = {:.8}", info.z_drift);
            println!(
                "  pole period 4*pi*tau/kappa = {:.8}",
                space.pole_height_shift().unwrap()
            );
            println!("  compactness: {:?}", info.compactness);
            println!(
                "  profile: {} samples, x range up to {:.1}",
                info.profile.samples.len(),
                info.profile
                    .samples
                    .iter()
                    .map(|s| s.x)
                    .fold(0.0f64, f64::max)
            );
        }
        Err(e) => println!("  search failed: {e}"),
    }
}
