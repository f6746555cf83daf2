//! Deterministic SVG phase portraits.
//!
//! A portrait shows the phase plane of one ε-sheet: the boundary curves
//! Ω± (y = ±1/√(1 + τ²x²)), the nullcline Γ_ε clipped to the plane, the
//! equilibria, monotonicity-direction glyphs on a coarse grid, and any
//! requested orbits as (x, ν) projections of integrated profile curves.

use crate::ambient::AmbientSpace;
use crate::integrate::{integrate, AngularState, Budget, IntegrateOpts, StopSpec};
use crate::phaseplane::{equilibrium, gamma_curve, region_classify, Eps, PhaseState};
use crate::prescribed::PrescribedH;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Seeded, fixed palette; orbits cycle through it.
const PALETTE: [&str; 6] = [
    "#1965b0", "#dc050c", "#4eb265", "#882e72", "#f1932d", "#5289c7",
];

#[derive(Debug, Clone)]
pub struct PhasePlotOpts {
    pub eps: Eps,
    /// Upper x limit of the view; defaults to the wall for κ < 0 and to a
    /// multiple of the equilibrium radius otherwise.
    pub x_view: Option<f64>,
    /// y = 0 seeds of orbits to draw, with the sheet they start on.
    pub orbit_seeds: Vec<(f64, Eps)>,
    pub width: u32,
    pub height: u32,
    /// Number of Γ_ε sample heights.
    pub gamma_samples: usize,
    pub arc_budget: f64,
}

impl Default for PhasePlotOpts {
    fn default() -> Self {
        PhasePlotOpts {
            eps: Eps::Plus,
            x_view: None,
            orbit_seeds: Vec::new(),
            width: 640,
            height: 480,
            gamma_samples: 600,
            arc_budget: 30.0,
        }
    }
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = (x - self.x_lo) / (self.x_hi - self.x_lo) * self.w;
        let py = (self.y_hi - y) / (self.y_hi - self.y_lo) * self.h;
        (px, py)
    }

    fn polyline(&self, pts: &[(f64, f64)], style: &str) -> String {
        if pts.len() < 2 {
            return String::new();
        }
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let (px, py) = self.map(*x, *y);
            let _ = write!(
                d,
                "{}{},{}",
                if i == 0 { "M" } else { " L" },
                fmt2(px),
                fmt2(py)
            );
        }
        format!("<path d=\"{d}\" fill=\"none\" {style}/>\n")
    }
}

pub fn render_phase_plot(space: &AmbientSpace, h: &PrescribedH, opts: &PhasePlotOpts) -> String {
    let e0 = equilibrium(space, h, Eps::Plus).map(|e| e.x).unwrap_or(1.0);
    let x_hi_default = match space.wall_radius() {
        Some(w) => w,
        None => {
            let em1 = equilibrium(space, h, Eps::Minus).map(|e| e.x);
            (4.0 * e0).max(em1.map(|x| 1.6 * x).unwrap_or(0.0))
        }
    };
    let x_hi = opts.x_view.unwrap_or(x_hi_default);
    // 5% margins around the data box [0, x_hi] x [-1, 1].
    let frame = Frame {
        x_lo: -0.05 * x_hi,
        x_hi: 1.05 * x_hi,
        y_lo: -1.1,
        y_hi: 1.1,
        w: opts.width as f64,
        h: opts.height as f64,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        opts.width, opts.height, opts.width, opts.height
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes: x >= 0 and y = 0.
    let axis_style = "stroke=\"#444444\" stroke-width=\"1\"";
    svg.push_str(&frame.polyline(&[(0.0, -1.0), (0.0, 1.0)], axis_style));
    svg.push_str(&frame.polyline(&[(0.0, 0.0), (x_hi, 0.0)], axis_style));

    // Boundary Omega: y = ±1/sqrt(1+tau^2 x^2).
    let tau = space.tau();
    let n = 256;
    for sign in [1.0, -1.0] {
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let x = x_hi * i as f64 / n as f64;
                (x, sign / (1.0 + tau * tau * x * x).sqrt())
            })
            .collect();
        svg.push_str(&frame.polyline(&pts, "stroke=\"#000000\" stroke-width=\"1.5\""));
    }

    // Nullcline, clipped to the plane; breaks where it leaves.
    let mut segment: Vec<(f64, f64)> = Vec::new();
    let mut gamma_paths = String::new();
    let style_gamma = "stroke=\"#267300\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"";
    for i in 0..=opts.gamma_samples {
        let y = -1.0 + 2.0 * i as f64 / opts.gamma_samples as f64;
        match gamma_curve(space, h, opts.eps, y) {
            Some(x) if x <= x_hi => segment.push((x, y)),
            _ => {
                gamma_paths.push_str(&frame.polyline(&segment, style_gamma));
                segment.clear();
            }
        }
    }
    gamma_paths.push_str(&frame.polyline(&segment, style_gamma));
    svg.push_str(&gamma_paths);

    // Equilibria markers.
    for eps in [Eps::Plus, Eps::Minus] {
        if let Some(e) = equilibrium(space, h, eps) {
            if e.x <= x_hi {
                let (px, py) = frame.map(e.x, 0.0);
                let fill = if eps == opts.eps {
                    "#000000"
                } else {
                    "#999999"
                };
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{fill}\"/>",
                    fmt2(px),
                    fmt2(py)
                );
            }
        }
    }

    // Monotonicity glyphs: normalized direction of (x', y') on a coarse grid.
    for i in 1..10 {
        for j in 1..10 {
            let x = x_hi * i as f64 / 10.0;
            let y = -0.95 + 1.9 * j as f64 / 10.0;
            if y * y * (1.0 + tau * tau * x * x) >= 0.95 {
                continue;
            }
            let state = PhaseState {
                x,
                y,
                eps: opts.eps,
            };
            let info = region_classify(space, h, &state);
            let (dx, dy) = (y.signum() * 0.6, info.sign_dy as f64 * 0.8);
            let norm = (dx * dx + dy * dy).sqrt().max(1e-9);
            let scale = 0.03 * x_hi;
            let (x1, y1) = (x - 0.5 * scale * dx / norm, y - 0.02 * dy / norm);
            let (x2, y2) = (x + 0.5 * scale * dx / norm, y + 0.02 * dy / norm);
            let (p1x, p1y) = frame.map(x1, y1);
            let (p2x, p2y) = frame.map(x2, y2);
            let _ = writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\" stroke-width=\"1\" marker-end=\"url(#ah)\"/>",
                fmt2(p1x), fmt2(p1y), fmt2(p2x), fmt2(p2y)
            );
        }
    }

    // Requested orbits as (x, nu) projections.
    for (i, (x0, eps)) in opts.orbit_seeds.iter().enumerate() {
        let theta0 = match eps {
            Eps::Plus => PI / 2.0,
            Eps::Minus => 1.5 * PI,
        };
        let init = AngularState::new(0.0, *x0, 0.0, theta0);
        let budget = Budget::for_space(space).with_arc(opts.arc_budget);
        if let Ok(traj) = integrate(
            space,
            h,
            init,
            &StopSpec::budget_only(),
            &budget,
            &IntegrateOpts::default(),
        ) {
            let pts: Vec<(f64, f64)> = traj
                .samples
                .iter()
                .map(|st| (st.x, st.nu(space)))
                .filter(|(x, _)| *x <= x_hi)
                .collect();
            let color = PALETTE[i % PALETTE.len()];
            let style = format!("stroke=\"{color}\" stroke-width=\"1.2\"");
            svg.push_str(&frame.polyline(&pts, &style));
        }
    }

    svg.push_str(
        "<defs><marker id=\"ah\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#bbbbbb\"/></marker></defs>\n",
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn portraits_are_deterministic_and_show_nullcline_topology() {
        let h = PrescribedH::constant(1.0);

        // Nil: disconnected Gamma_{-1} (two dashed branches, none crossing y=0).
        let nil = AmbientSpace::new(0.0, 1.0).unwrap();
        let opts = PhasePlotOpts {
            eps: Eps::Minus,
            x_view: Some(3.0),
            ..Default::default()
        };
        let a = render_phase_plot(&nil, &h, &opts);
        let b = render_phase_plot(&nil, &h, &opts);
        assert_eq!(a, b);
        let dashed = a.matches("stroke-dasharray").count();
        assert!(
            dashed >= 2,
            "expected a disconnected nullcline, got {dashed} segments"
        );

        // H2xR: Gamma_{-1} absent entirely.
        let h2r = AmbientSpace::new(-1.0, 0.0).unwrap();
        let c = render_phase_plot(
            &h2r,
            &h,
            &PhasePlotOpts {
                eps: Eps::Minus,
                ..Default::default()
            },
        );
        assert_eq!(c.matches("stroke-dasharray").count(), 0);

        // Berger: Gamma_{-1} is one compact arc joining the corners.
        let berger = AmbientSpace::new(4.0, 0.5).unwrap();
        let d = render_phase_plot(
            &berger,
            &h,
            &PhasePlotOpts {
                eps: Eps::Minus,
                x_view: Some(4.0),
                ..Default::default()
            },
        );
        assert_eq!(d.matches("stroke-dasharray").count(), 1);
    }
}
