//! Command-line surface. The binary is a thin wrapper: parsing here, all
//! numerics in the library modules.
//!
//! Exit codes: 0 success, 1 domain or classification failure, 2 usage or
//! parse errors.

use crate::ambient::AmbientSpace;
use crate::classify::{classify, ClassifyOpts};
use crate::config::{PhasePlotSpec, RunConfig};
use crate::export::{
    events_json, render_phase_plot, revolve_profile, trajectory_csv, write_obj, PhasePlotOpts,
};
use crate::phaseplane::Eps;
use crate::prescribed::PrescribedH;
use crate::torus::{find_torus, nonexistence_check, TorusOpts};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hsurf",
    version,
    about = "Rotational prescribed-mean-curvature surfaces in E(kappa,tau): validation, classification, phase portraits, profiles, meshes, torus search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Primary output path (defaults to stdout where sensible).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Relative tolerance override.
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    /// Absolute tolerance override.
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    /// x budget override.
    #[arg(long, global = true)]
    pub x_max: Option<f64>,
    /// Arc-length budget override.
    #[arg(long, global = true)]
    pub arc_budget: Option<f64>,
    /// Angular resolution override for meshes.
    #[arg(long, global = true)]
    pub angular_res: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the prescribed function's admissibility for the space.
    Validate,
    /// Classify the configured seed and print the surface class as JSON.
    Classify {
        /// Also write the profile trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        trajectory_csv: Option<PathBuf>,
    },
    /// Render the phase portrait as SVG.
    PhasePlot,
    /// Integrate the configured seed and export the trajectory CSV.
    Profile {
        /// Sidecar event list (JSON).
        #[arg(long, value_name = "PATH")]
        events_json: Option<PathBuf>,
    },
    /// Revolve a profile into a triangle mesh (OBJ).
    Mesh {
        /// Read the profile from a trajectory CSV instead of integrating.
        #[arg(long, value_name = "PATH")]
        profile_csv: Option<PathBuf>,
    },
    /// Search the two-plateau family for a closed rotational torus.
    TorusSearch,
}

pub fn run(cli: Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            EXIT_DOMAIN
        }
    }
}

enum CliError {
    Usage(String),
    Domain(String),
}

fn usage<T: std::fmt::Display>(e: T) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain<T: std::fmt::Display>(e: T) -> CliError {
    CliError::Domain(e.to_string())
}

struct Loaded {
    config: RunConfig,
    space: AmbientSpace,
    h: PrescribedH,
    classify_opts: ClassifyOpts,
}

fn load(cli: &Cli) -> Result<Loaded, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config <PATH> is required".to_string()))?;
    let config = RunConfig::load(path).map_err(usage)?;
    let space = config.space;
    let h = config.prescribed().map_err(usage)?;
    let tol = config.tolerances_or_default();
    let mut opts = ClassifyOpts {
        rtol: cli.rtol.unwrap_or(tol.rtol),
        atol: cli.atol.unwrap_or(tol.atol),
        ..Default::default()
    };
    if let Some(b) = &config.budget {
        if let Some(arc) = b.arc_max {
            opts.arc_budget = arc;
        }
        opts.x_max = b.x_max;
    }
    if let Some(arc) = cli.arc_budget {
        opts.arc_budget = arc;
    }
    if let Some(xm) = cli.x_max {
        opts.x_max = Some(xm);
    }
    Ok(Loaded {
        config,
        space,
        h,
        classify_opts: opts,
    })
}

fn write_output(
    path: Option<&Path>,
    default_name: &str,
    content: &str,
) -> Result<PathBuf, CliError> {
    let target = path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(default_name));
    std::fs::write(&target, content).map_err(domain)?;
    Ok(target)
}

fn run_inner(cli: Cli) -> Result<i32, CliError> {
    match &cli.cmd {
        Command::Validate => {
            let l = load(&cli)?;
            let report = l.h.validate_c1(&l.space);
            let text = serde_json::to_string_pretty(&report).map_err(domain)?;
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, text + "\n").map_err(domain)?;
                }
                None => println!("{text}"),
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_DOMAIN })
        }
        Command::Classify { trajectory_csv } => {
            let l = load(&cli)?;
            let seed = l
                .config
                .seed
                .ok_or_else(|| CliError::Usage("config has no seed".to_string()))?;
            let outcome = classify(&l.space, &l.h, seed, &l.classify_opts).map_err(domain)?;
            let text = serde_json::to_string_pretty(&outcome.class).map_err(domain)?;
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, text.clone() + "\n").map_err(domain)?;
                }
                None => println!("{text}"),
            }
            if let Some(path) = trajectory_csv {
                let csv = trajectory_csv_string(&l, &outcome.profile);
                std::fs::write(path, csv).map_err(domain)?;
            }
            Ok(EXIT_OK)
        }
        Command::PhasePlot => {
            let l = load(&cli)?;
            let spec = l.config.phase_plot.clone().unwrap_or(PhasePlotSpec {
                eps: 1,
                x_view: None,
                orbits: Vec::new(),
            });
            let opts = PhasePlotOpts {
                eps: if spec.eps >= 0 { Eps::Plus } else { Eps::Minus },
                x_view: spec.x_view,
                orbit_seeds: spec
                    .orbits
                    .iter()
                    .map(|o| (o.x0, if o.eps >= 0 { Eps::Plus } else { Eps::Minus }))
                    .collect(),
                ..Default::default()
            };
            let svg = render_phase_plot(&l.space, &l.h, &opts);
            let target = write_output(cli.out.as_deref(), "phase.svg", &svg)?;
            eprintln!("wrote {}", target.display());
            Ok(EXIT_OK)
        }
        Command::Profile {
            events_json: events_path,
        } => {
            let l = load(&cli)?;
            let seed = l
                .config
                .seed
                .ok_or_else(|| CliError::Usage("config has no seed".to_string()))?;
            let outcome = classify(&l.space, &l.h, seed, &l.classify_opts).map_err(domain)?;
            let csv = trajectory_csv_string(&l, &outcome.profile);
            match &cli.out {
                Some(path) => std::fs::write(path, csv).map_err(domain)?,
                None => print!("{csv}"),
            }
            if let Some(path) = events_path {
                let ev = events_json(&l.space, &outcome.profile);
                let text = serde_json::to_string_pretty(&ev).map_err(domain)?;
                std::fs::write(path, text + "\n").map_err(domain)?;
            }
            Ok(EXIT_OK)
        }
        Command::Mesh { profile_csv } => {
            let l = load(&cli)?;
            let profile: Vec<(f64, f64)> = match profile_csv {
                Some(path) => read_profile_csv(path)?,
                None => {
                    let seed = l.config.seed.ok_or_else(|| {
                        CliError::Usage("config has no seed and no --profile-csv given".to_string())
                    })?;
                    let outcome =
                        classify(&l.space, &l.h, seed, &l.classify_opts).map_err(domain)?;
                    outcome.profile.profile_xz()
                }
            };
            let mesh_spec = l.config.mesh.clone().unwrap_or_default();
            let segments = cli.angular_res.unwrap_or(mesh_spec.angular_res);
            let mesh = revolve_profile(&profile, segments).map_err(domain)?;
            let berger = mesh_spec
                .berger_coords
                .then_some(&l.space)
                .filter(|s| s.kappa() > 0.0 && s.tau() > 0.0);
            let mut buf = Vec::new();
            write_obj(&mut buf, &mesh, berger).map_err(domain)?;
            let text = String::from_utf8(buf).expect("obj is utf8");
            let target = write_output(cli.out.as_deref(), "surface.obj", &text)?;
            eprintln!("wrote {}", target.display());
            Ok(EXIT_OK)
        }
        Command::TorusSearch => {
            let l = load(&cli)?;
            if l.space.kappa() > 0.0 {
                return Err(CliError::Domain(
                    "torus search is for kappa <= 0, tau > 0; kappa > 0 tori are handled by the classifier (seeds s2xr-equator / berger-pole)"
                        .to_string(),
                ));
            }
            if nonexistence_check(&l.h) {
                let refusal = serde_json::json!({
                    "refused": true,
                    "nonexistence_check": true,
                    "reason": "prescribed function is non-increasing on [-1, 0]; no rotational torus exists in this space",
                });
                let text = serde_json::to_string_pretty(&refusal).map_err(domain)?;
                match &cli.out {
                    Some(path) => std::fs::write(path, text + "\n").map_err(domain)?,
                    None => println!("{text}"),
                }
                return Ok(EXIT_DOMAIN);
            }
            let spec = l
                .config
                .torus_search
                .ok_or_else(|| CliError::Usage("config has no torus_search section".to_string()))?;
            let topts = TorusOpts {
                base: l.classify_opts,
                ..Default::default()
            };
            let result =
                find_torus(&l.space, spec.h0, spec.x1, spec.delta, &topts).map_err(domain)?;
            let profile_ref = cli
                .out
                .as_ref()
                .map(|p| p.with_extension("profile.csv"))
                .unwrap_or_else(|| PathBuf::from("torus.profile.csv"));
            let report = serde_json::json!({
                "lambda0": result.lambda0,
                "gap": result.gap_at_lambda0,
                "I1": result.i1,
                "I2": result.i2,
                "nu0": result.nu0,
                "delta": result.delta,
                "x1": result.x1,
                "closure_residual": result.nodoid.closure_residual,
                "profile_ref": profile_ref.display().to_string(),
            });
            let text = serde_json::to_string_pretty(&report).map_err(domain)?;
            let csv = trajectory_csv_string(&l, &result.nodoid.profile);
            std::fs::write(&profile_ref, csv).map_err(domain)?;
            match &cli.out {
                Some(path) => std::fs::write(path, text + "\n").map_err(domain)?,
                None => println!("{text}"),
            }
            Ok(EXIT_OK)
        }
    }
}

fn trajectory_csv_string(l: &Loaded, traj: &crate::integrate::Trajectory) -> String {
    trajectory_csv(&l.space, &l.h, traj)
}

/// Accepts either a bare `x,z` table or the trajectory CSV schema (using its
/// x and z columns).
fn read_profile_csv(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(usage)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parsed: Option<(f64, f64)> = match fields.len() {
            2 => match (fields[0].parse(), fields[1].parse()) {
                (Ok(x), Ok(z)) => Some((x, z)),
                _ => None,
            },
            n if n >= 3 => match (fields[1].parse(), fields[2].parse()) {
                (Ok(x), Ok(z)) => Some((x, z)),
                _ => None,
            },
            _ => None,
        };
        match parsed {
            Some(p) => out.push(p),
            None if i == 0 => {} // header
            None => {
                return Err(CliError::Usage(format!(
                    "cannot parse profile row {} of {}",
                    i + 1,
                    path.display()
                )))
            }
        }
    }
    if out.len() < 2 {
        return Err(CliError::Usage(format!(
            "profile {} has fewer than two points",
            path.display()
        )));
    }
    Ok(out)
}
