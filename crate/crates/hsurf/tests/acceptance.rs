//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured margins. Run with `cargo test -p hsurf --test acceptance`
//! (add `-- --nocapture` to see the lines).

use hsurf::ambient::AmbientSpace;
use hsurf::classify::{
    berger_compactness, berger_pole_orbit, shoot_sphere, trace_nodoid, trace_unduloid,
    ClassifyOpts, Compactness,
};
use hsurf::integrate::{
    angular_second_derivs, arc_identity_residual, curvature_residual, integrate, AngularState,
    Budget, EventKind, IntegrateOpts, StopSpec, Trajectory,
};
use hsurf::phaseplane::{equilibrium, gamma_curve, raw_gamma_value, Eps, PhaseState};
use hsurf::prescribed::PrescribedH;
use hsurf::torus::{find_torus, torus_gap, TorusOpts};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn euclid() -> AmbientSpace {
    AmbientSpace::space_form_limit(0.0, 0.0).unwrap()
}

/// The five representative proper geometries.
fn spaces() -> Vec<(&'static str, AmbientSpace)> {
    vec![
        ("H2xR", AmbientSpace::new(-1.0, 0.0).unwrap()),
        ("Nil3", AmbientSpace::new(0.0, 1.0).unwrap()),
        ("SL2", AmbientSpace::new(-1.0, 1.0).unwrap()),
        ("S2xR", AmbientSpace::new(1.0, 0.0).unwrap()),
        ("Berger", AmbientSpace::new(4.0, 0.5).unwrap()),
    ]
}

fn table_h() -> PrescribedH {
    PrescribedH::table(&[(0.0, 1.0), (0.5, 1.2), (1.0, 1.5)]).unwrap()
}

#[test]
fn criterion_01_euclidean_sphere_oracle() {
    let opts = ClassifyOpts::default();
    let mut worst = 0.0f64;
    for h0 in [0.5, 1.0, 2.0] {
        let h = PrescribedH::constant(h0);
        let sphere = shoot_sphere(&euclid(), &h, &opts).unwrap();
        let dr = (sphere.r0 - 1.0 / h0).abs();
        let dh = (sphere.height - 2.0 / h0).abs();
        assert!(dr < 1e-6, "H0 = {h0}: r0 off by {dr}");
        assert!(dh < 1e-6, "H0 = {h0}: height off by {dh}");
        worst = worst.max(dr).max(dh);
    }
    println!("ACCEPTANCE 1 PASS euclidean sphere oracle (worst deviation {worst:.2e} < 1e-6)");
}

/// y'-component of the phase field at (Γ_ε(y), y), relative to the scale of
/// its constituent terms.
fn nullcline_relative_residual(
    space: &AmbientSpace,
    h: &PrescribedH,
    eps: Eps,
    x: f64,
    y: f64,
) -> f64 {
    let state = PhaseState { x, y, eps };
    let (_, dy) = hsurf::integrate::rhs_phase(space, h, &state).unwrap();
    let (kappa, tau) = (space.kappa(), space.tau());
    let hy = h.eval_clamped(y);
    let one_t2x2 = 1.0 + tau * tau * x * x;
    let radicand = (1.0 - one_t2x2 * y * y).max(0.0);
    let num_scale = 4.0
        + (kappa * x * x).abs()
        + (y * y * (4.0 - x * x * (kappa - 8.0 * tau * tau))).abs()
        + (8.0 * x * hy * radicand.sqrt()).abs();
    let den = x * (4.0 + kappa * x * x) * one_t2x2;
    dy.abs() / (num_scale / den)
}

#[test]
fn criterion_02_nullcline_residual() {
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for (_, space) in spaces() {
        for h in [PrescribedH::constant(1.0), table_h()] {
            for eps in [Eps::Plus, Eps::Minus] {
                let mut found = 0;
                for j in 0..400 {
                    if found >= 200 {
                        break;
                    }
                    let y = -0.999 + 1.998 * j as f64 / 399.0;
                    if let Some(x) = gamma_curve(&space, &h, eps, y) {
                        let rel = nullcline_relative_residual(&space, &h, eps, x, y);
                        assert!(
                            rel < 1e-9,
                            "nullcline residual {rel} at y = {y}, eps {eps:?}, space ({}, {})",
                            space.kappa(),
                            space.tau()
                        );
                        worst = worst.max(rel);
                        found += 1;
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(
        checked > 1000,
        "too few nullcline points sampled: {checked}"
    );
    println!(
        "ACCEPTANCE 2 PASS nullcline residual ({checked} points, worst relative {worst:.2e} < 1e-9)"
    );
}

#[test]
fn criterion_03_nullcline_position_bounds() {
    let hs = [PrescribedH::constant(1.0), table_h()];
    let n = 500;
    let mut min_margin = f64::INFINITY;
    for h in &hs {
        // kappa < 0: Gamma_1 stays inside the model disk.
        for space in [
            AmbientSpace::new(-1.0, 0.0).unwrap(),
            AmbientSpace::new(-1.0, 1.0).unwrap(),
        ] {
            let wall = space.wall_radius().unwrap();
            for j in 0..=n {
                let y = -1.0 + 2.0 * j as f64 / n as f64;
                if let Some(g) = raw_gamma_value(&space, h, Eps::Plus, y) {
                    let margin = (wall - g) / wall;
                    assert!(margin >= 1e-10, "Gamma_1 wall bound fails at y = {y}: margin {margin}");
                    min_margin = min_margin.min(margin);
                } else {
                    panic!("Gamma_1 undefined at y = {y} for kappa < 0");
                }
            }

            // Gamma_{-1}(0) exists as a formula value but lies beyond the wall.
            let g = raw_gamma_value(&space, h, Eps::Minus, 0.0).unwrap();
            let margin = (g - wall) / wall;
            assert!(margin >= 1e-10, "Gamma_-1(0) wall bound margin {margin}");
            min_margin = min_margin.min(margin);
        }

        // kappa < 0, tau = 0: Gamma_{-1} never enters the phase plane.
        let h2r = AmbientSpace::new(-1.0, 0.0).unwrap();
        let wall = h2r.wall_radius().unwrap();
        for j in 0..=n {
            let y = -1.0 + 2.0 * j as f64 / n as f64;
            assert!(
                gamma_curve(&h2r, h, Eps::Minus, y).is_none(),
                "Gamma_-1 entered Theta at y = {y} with kappa < 0, tau = 0"
            );
            if y.abs() < 1.0 - 1e-9 {
                if let Some(g) = raw_gamma_value(&h2r, h, Eps::Minus, y) {
                    let margin = (g - wall) / wall;
                    assert!(margin >= 1e-10, "Gamma_-1 wall margin {margin} at y = {y}");
                    min_margin = min_margin.min(margin);
                }
            }
        }

        // kappa > 0, tau = 0: Gamma_{-1} stays beyond the equator radius.
        let s2r = AmbientSpace::new(1.0, 0.0).unwrap();
        let bound = 2.0;
        for j in 1..n {
            let y = -1.0 + 2.0 * j as f64 / n as f64;
            let g = raw_gamma_value(&s2r, h, Eps::Minus, y).unwrap();
            let margin = (g - bound) / bound;
            assert!(margin >= 1e-10, "Gamma_-1 equator margin {margin} at y = {y}");
            min_margin = min_margin.min(margin);
        }

        // Berger: Gamma_{-1} is a compact arc, beyond the equator at y = 0
        // and pinched to 0 at the corners y = ±1.
        let berger = AmbientSpace::new(4.0, 0.5).unwrap();
        let g0 = raw_gamma_value(&berger, h, Eps::Minus, 0.0).unwrap();
        let margin = (g0 - 1.0) / 1.0;
        assert!(margin >= 1e-10, "Berger Gamma_-1(0) margin {margin}");
        min_margin = min_margin.min(margin);
        for y in [1.0, -1.0] {
            assert_eq!(raw_gamma_value(&berger, h, Eps::Minus, y), Some(0.0));
        }
        // Monotone approach to the corners.
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let g = raw_gamma_value(&berger, h, Eps::Minus, 1.0 - 10f64.powi(-k)).unwrap();
            assert!(
                g > 0.0 && g < prev,
                "corner approach not shrinking at k = {k}"
            );
            prev = g;
        }
    }
    println!("ACCEPTANCE 3 PASS nullcline position bounds (min scaled margin {min_margin:.2e} >= 1e-10)");
}

/// Shared trajectory corpus: spheres, a cylinder, unduloids, and the
/// criterion-6 nodoid seeds across the five spaces.
fn corpus() -> Vec<(String, AmbientSpace, PrescribedH, Trajectory)> {
    let opts = ClassifyOpts::default();
    let h1 = PrescribedH::constant(1.0);
    let mut out = Vec::new();
    for (name, space) in spaces() {
        let sphere = shoot_sphere(&space, &h1, &opts).unwrap();
        out.push((format!("{name}/sphere"), space, h1.clone(), sphere.profile));

        for (k, x0) in nodoid_seeds(&space, sphere.r0).into_iter().enumerate() {
            let nodoid = trace_nodoid(&space, &h1, x0, &opts).unwrap();
            out.push((
                format!("{name}/nodoid{k}"),
                space,
                h1.clone(),
                nodoid.profile,
            ));
        }
    }
    // A cylinder and two unduloids in representative spaces.
    let nil = AmbientSpace::new(0.0, 1.0).unwrap();
    let cyl = hsurf::classify::build_cylinder(&nil, &h1, &opts).unwrap();
    out.push(("Nil3/cylinder".to_string(), nil, h1.clone(), cyl.profile));
    for x0 in [0.1, 0.3] {
        let u = trace_unduloid(&euclid(), &h1, x0, &opts).unwrap();
        out.push((
            format!("euclid/unduloid{x0}"),
            euclid(),
            h1.clone(),
            u.profile,
        ));
    }
    out
}

fn nodoid_seeds(space: &AmbientSpace, r0: f64) -> Vec<f64> {
    match space.wall_radius() {
        Some(wall) => [0.15, 0.3, 0.45, 0.6]
            .iter()
            .map(|f| r0 + f * (wall - r0))
            .collect(),
        None => [1.2, 1.5, 2.0, 2.5].iter().map(|f| f * r0).collect(),
    }
}

#[test]
fn criterion_04_conservation_and_curvature() {
    let mut worst_arc = 0.0f64;
    let mut worst_curv = 0.0f64;
    let corpus = corpus();
    assert!(corpus.len() >= 25);
    for (name, space, h, traj) in &corpus {
        let arc = arc_identity_residual(space, h, traj);
        let curv = curvature_residual(space, h, traj);
        assert!(arc < 1e-9, "{name}: arc identity residual {arc}");
        assert!(curv < 1e-7, "{name}: curvature residual {curv}");
        worst_arc = worst_arc.max(arc);
        worst_curv = worst_curv.max(curv);
    }
    println!(
        "ACCEPTANCE 4 PASS conservation on {} trajectories (arc {worst_arc:.2e} < 1e-9, curvature {worst_curv:.2e} < 1e-7)",
        corpus.len()
    );
}

#[test]
fn criterion_05_orbit_symmetry() {
    // If (x(s), y(s)) solves the phase system, so does (x(−s), −y(−s)).
    // Checked by retracing: run forward from a y = 0 seed, reflect the final
    // state (θ ↦ π − θ), integrate forward again from there, and compare
    // against the reflection of the first run. The two integrations start
    // from different points of the orbit, so nothing cancels by construction.
    let h = PrescribedH::constant(1.0);
    let mut worst = 0.0f64;
    let arc = 4.0;
    let ds = 0.02;
    for (name, space) in spaces() {
        let seed = AngularState::new(0.0, 1.4, 0.0, PI / 2.0);
        let budget = Budget::for_space(&space).with_arc(arc);
        let opts = IntegrateOpts {
            sample_every: Some(ds),
            ..Default::default()
        };
        let fwd = integrate(&space, &h, seed, &StopSpec::budget_only(), &budget, &opts).unwrap();
        let end = fwd.final_state();
        let reflected = AngularState::new(0.0, end.x, 0.0, PI - end.theta);
        let back = integrate(
            &space,
            &h,
            reflected,
            &StopSpec::budget_only(),
            &budget,
            &opts,
        )
        .unwrap();
        let n = (arc / ds).round() as usize;
        let fgrid = grid_index(&fwd.samples, 0.0, ds);
        let bgrid: std::collections::HashMap<usize, AngularState> =
            grid_index(&back.samples, 0.0, ds).into_iter().collect();
        let mut matched = 0;
        for (k, f) in &fgrid {
            let Some(b) = bgrid.get(&(n - k)) else {
                continue;
            };
            let dx = (f.x - b.x).abs();
            let dnu = (f.nu(&space) + b.nu(&space)).abs();
            let dz = ((end.z - f.z) - b.z).abs();
            assert!(
                dx < 1e-8 && dnu < 1e-8 && dz < 1e-8,
                "{name}: retrace mismatch at s = {}: dx = {dx}, dnu = {dnu}, dz = {dz}",
                f.s
            );
            worst = worst.max(dx).max(dnu).max(dz);
            matched += 1;
        }
        assert!(
            matched >= n - 2,
            "{name}: only {matched} of {n} grid points matched"
        );
    }
    println!("ACCEPTANCE 5 PASS orbit symmetry (worst retrace mismatch {worst:.2e} < 1e-8)");
}

/// Index samples of a uniformly sampled trajectory by grid position,
/// skipping off-grid entries (budget landings can sit a few ulp off).
fn grid_index(samples: &[AngularState], s0: f64, ds: f64) -> Vec<(usize, AngularState)> {
    samples
        .iter()
        .filter_map(|st| {
            let k = ((st.s - s0) / ds).round();
            ((st.s - s0 - k * ds).abs() < 1e-9).then_some((k as usize, *st))
        })
        .collect()
}

#[test]
fn criterion_06_omega_contact_signs() {
    let opts = ClassifyOpts::default();
    let h = PrescribedH::constant(1.0);
    let mut contacts = 0usize;
    let mut seeds = 0usize;
    for (name, space) in spaces() {
        let r0 = shoot_sphere(&space, &h, &opts).unwrap().r0;
        for x0 in nodoid_seeds(&space, r0) {
            seeds += 1;
            let nodoid = trace_nodoid(&space, &h, x0, &opts).unwrap();
            for e in &nodoid.profile.events {
                let sign = match e.kind {
                    EventKind::OmegaPlus => 1.0,
                    EventKind::OmegaMinus => -1.0,
                    _ => continue,
                };
                let (_, ddz) = angular_second_derivs(&space, &h, &e.state).unwrap();
                assert!(
                    ddz * sign > 0.0,
                    "{name}: z'' = {ddz} at {:?} (x0 = {x0})",
                    e.kind
                );
                contacts += 1;
            }
        }
    }
    assert!(seeds >= 20, "corpus has only {seeds} nodoid seeds");
    println!(
        "ACCEPTANCE 6 PASS omega contact signs ({seeds} seeds, {contacts} contacts, all z'' signs correct)"
    );
}

/// Random C¹ table, non-increasing on [−1, 0] (values non-decreasing in |y|),
/// admissible for kappa ∈ [−1, 0].
fn random_nonincreasing_table(rng: &mut ChaCha8Rng) -> PrescribedH {
    let knots = 4 + (rng.gen::<u64>() % 4) as usize;
    let mut values: Vec<f64> = (0..knots).map(|_| 0.8 + 1.2 * rng.gen::<f64>()).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pairs: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (i as f64 / (knots - 1) as f64, *v))
        .collect();
    PrescribedH::table(&pairs).unwrap()
}

#[test]
fn criterion_07_nonexistence_gap_positive() {
    let topts = TorusOpts::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let x1 = 0.9;
    let mut cases = vec![PrescribedH::constant(1.0)];
    for _ in 0..10 {
        cases.push(random_nonincreasing_table(&mut rng));
    }
    let mut min_gap = f64::INFINITY;
    let mut worst_consistency = 0.0f64;
    for kappa in [0.0, -1.0] {
        let space = AmbientSpace::new(kappa, 1.0).unwrap();
        for (i, h) in cases.iter().enumerate() {
            assert!(
                hsurf::torus::nonexistence_check(h),
                "case {i} not non-increasing"
            );
            let r = torus_gap(&space, h, x1, &topts).unwrap();
            assert!(r.gap > 0.0, "kappa = {kappa}, case {i}: gap = {}", r.gap);
            min_gap = min_gap.min(r.gap);

            // Independent computation: arc-length integration of the same arc.
            let init = AngularState::new(0.0, r.seed_x, 0.0, PI / 2.0);
            let traj = integrate(
                &space,
                h,
                init,
                &StopSpec::after_y0(1),
                &Budget::for_space(&space),
                &IntegrateOpts::default(),
            )
            .unwrap();
            let z_ode = traj.first_event(EventKind::Y0Crossing).unwrap().state.z;
            let diff = (z_ode - r.gap).abs();
            assert!(
                diff < 1e-7,
                "kappa = {kappa}, case {i}: quadrature {} vs ODE {z_ode}",
                r.gap
            );
            worst_consistency = worst_consistency.max(diff);
        }
    }
    println!(
        "ACCEPTANCE 7 PASS nonexistence gaps (22 cases, min gap {min_gap:.3e} > 0, quadrature-vs-ODE {worst_consistency:.2e} < 1e-7)"
    );
}

#[test]
fn criterion_08_torus_search() {
    let topts = TorusOpts::default();
    let copts = ClassifyOpts::default();
    let h1 = PrescribedH::constant(1.0);
    for kappa in [0.0, -1.0] {
        let space = AmbientSpace::new(kappa, 1.0).unwrap();
        // x1 from a reference nodoid: the Omega radius of the constant-h
        // nodoid through (1.4, 0).
        let reference = trace_nodoid(&space, &h1, 1.4, &copts).unwrap();
        let x1 = reference.omega_x;
        let result = find_torus(&space, 1.0, x1, 0.05, &topts).unwrap();
        assert!(
            result.gap_at_lambda0.abs() < 1e-9,
            "kappa = {kappa}: |gap| = {}",
            result.gap_at_lambda0.abs()
        );
        assert!(
            result.nodoid.closes,
            "kappa = {kappa}: profile did not close"
        );
        assert!(
            result.nodoid.closure_residual < 1e-6,
            "kappa = {kappa}: closure residual {}",
            result.nodoid.closure_residual
        );
        assert!(result.lambda0 > 1.0 && result.lambda0 < 1e3);
        println!(
            "ACCEPTANCE 8 PASS torus search kappa = {kappa} (x1 = {x1:.6}, lambda0 = {:.8}, |gap| = {:.2e}, closure = {:.2e})",
            result.lambda0,
            result.gap_at_lambda0.abs(),
            result.nodoid.closure_residual
        );
    }
}

#[test]
fn criterion_09_berger_suite() {
    let opts = ClassifyOpts::default();
    let h = PrescribedH::constant(1.0);
    let berger = AmbientSpace::new(4.0, 0.5).unwrap();

    let e1 = equilibrium(&berger, &h, Eps::Minus).unwrap().x;
    let exact = 2.0f64.sqrt() + 1.0;
    assert!((e1 - exact).abs() < 1e-12, "e_-1 = {e1}");

    let pole = berger_pole_orbit(&berger, &h, &opts).unwrap();
    let width = pole.bracket.1 - pole.bracket.0;
    assert!(width <= 1e-8, "bracket width {width}");
    assert!(pole.xi0 < e1, "xi0 = {} not left of e_-1 = {e1}", pole.xi0);
    assert!(pole.bracket.1 < e1);

    // Trivial drift/period trichotomy; pole period pi realized by (2, 0.5).
    let ratio_space = AmbientSpace::new(2.0, 0.5).unwrap();
    assert!((ratio_space.pole_height_shift().unwrap() - PI).abs() < 1e-15);
    assert_eq!(
        berger_compactness(PI, &ratio_space).unwrap(),
        Compactness::EmbeddedTorus
    );
    assert_eq!(
        berger_compactness(2.0 * PI / 3.0, &ratio_space).unwrap(),
        Compactness::ImmersedTorus { p: 2, q: 3 }
    );
    assert_eq!(
        berger_compactness(PI / 2.0f64.sqrt(), &ratio_space).unwrap(),
        Compactness::DenseNoncompact
    );
    println!(
        "ACCEPTANCE 9 PASS berger suite (e_-1 exact to {:.1e}, xi0 = {:.10} bracketed to {width:.2e}, drift trichotomy exact)",
        (e1 - exact).abs(),
        pole.xi0
    );
}

#[test]
fn criterion_10_unduloid_family_limits() {
    let opts = ClassifyOpts::default();
    let h = PrescribedH::constant(1.0);
    let space = euclid();
    let e0 = equilibrium(&space, &h, Eps::Plus).unwrap().x;
    let r0 = shoot_sphere(&space, &h, &opts).unwrap().r0;

    // Necks approaching the equilibrium: bulges decrease to e0.
    let mut prev = f64::INFINITY;
    let mut bulge = f64::NAN;
    for k in 1..=10 {
        let x0 = e0 * (1.0 - 0.5f64.powi(k));
        bulge = trace_unduloid(&space, &h, x0, &opts).unwrap().bulge;
        assert!(bulge < prev, "bulge not monotone at k = {k}");
        assert!(bulge > e0);
        prev = bulge;
    }
    let dev_cyl = (bulge - e0).abs();
    assert!(dev_cyl < 1e-3, "cylinder-limit deviation {dev_cyl}");

    // Necks approaching zero: bulges increase to the sphere equator.
    let mut prev = 0.0;
    let mut bulge = f64::NAN;
    for k in 1..=10 {
        let x0 = e0 * 0.5f64.powi(k);
        bulge = trace_unduloid(&space, &h, x0, &opts).unwrap().bulge;
        assert!(bulge > prev, "bulge not monotone at k = {k}");
        assert!(bulge < r0);
        prev = bulge;
    }
    let dev_sph = (bulge - r0).abs();
    assert!(dev_sph < 1e-3, "sphere-limit deviation {dev_sph}");
    println!(
        "ACCEPTANCE 10 PASS unduloid limits (to cylinder {dev_cyl:.2e}, to sphere chain {dev_sph:.2e}, both < 1e-3, monotone)"
    );
}
