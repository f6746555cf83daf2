//! Render phase portraits for the five standard geometries.
//!
//! Each portrait draws the boundary Ω, the nullcline Γ_ε (dashed; it is
//! absent in Θ₋₁ for H²×ℝ, disconnected in Nil₃, and a compact arc in Berger
//! spheres), the equilibria, direction glyphs, and a few orbits.

use hsurf::ambient::AmbientSpace;
use hsurf::export::{render_phase_plot, PhasePlotOpts};
use hsurf::phaseplane::Eps;
use hsurf::prescribed::PrescribedH;
use std::fs;

fn main() -> std::io::Result<()> {
    let h = PrescribedH::constant(1.0);
    let out_dir = std::path::Path::new("out");
    fs::create_dir_all(out_dir)?;

    let cases = [
        (
            "h2r_minus",
            AmbientSpace::new(-1.0, 0.0).unwrap(),
            Eps::Minus,
            None,
        ),
        (
            "nil_minus",
            AmbientSpace::new(0.0, 1.0).unwrap(),
            Eps::Minus,
            Some(3.0),
        ),
        (
            "berger_minus",
            AmbientSpace::new(4.0, 0.5).unwrap(),
            Eps::Minus,
            Some(4.0),
        ),
        (
            "nil_plus",
            AmbientSpace::new(0.0, 1.0).unwrap(),
            Eps::Plus,
            Some(2.5),
        ),
    ];
    for (name, space, eps, x_view) in cases {
        let opts = PhasePlotOpts {
            eps,
            x_view,
            orbit_seeds: vec![(0.2, Eps::Plus), (0.4, Eps::Plus), (1.3, Eps::Plus)],
            ..Default::default()
        };
        let svg = render_phase_plot(&space, &h, &opts);
        let path = out_dir.join(format!("phase_{name}.svg"));
        fs::write(&path, svg)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
