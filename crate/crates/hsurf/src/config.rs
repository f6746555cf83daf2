//! Run configuration shared by the CLI, examples and tests.
//!
//! Configurations round-trip through JSON byte-identically: emit → parse →
//! emit reproduces the exact bytes (fields are plain structs in declaration
//! order, absent options are skipped, and float formatting is the shortest
//! round-trip representation).

use crate::ambient::AmbientSpace;
use crate::classify::ClassifySeed;
use crate::prescribed::{PrescribedError, PrescribedH, StepFamilySpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Prescribed-function specification, tagged by `kind`: `constant`, `table`
/// (knots for y ∈ [0, 1], evenness implicit), `step` (two-plateau family) and
/// `angle-linear`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum HSpec {
    #[serde(rename = "constant")]
    Constant {
        #[serde(rename = "H0")]
        h0: f64,
    },
    #[serde(rename = "angle-linear")]
    AngleLinear { c0: f64, c1: f64 },
    #[serde(rename = "table")]
    Table { knots: Vec<[f64; 2]> },
    #[serde(rename = "step")]
    Step {
        #[serde(rename = "H0")]
        h0: f64,
        lambda: f64,
        nu0: f64,
        delta: f64,
    },
}

impl HSpec {
    pub fn build(&self) -> Result<PrescribedH, PrescribedError> {
        match self {
            HSpec::Constant { h0 } => Ok(PrescribedH::constant(*h0)),
            HSpec::AngleLinear { c0, c1 } => Ok(PrescribedH::angle_linear(*c0, *c1)),
            HSpec::Table { knots } => {
                let pairs: Vec<(f64, f64)> = knots.iter().map(|k| (k[0], k[1])).collect();
                PrescribedH::table(&pairs)
            }
            HSpec::Step {
                h0,
                lambda,
                nu0,
                delta,
            } => PrescribedH::step_family(StepFamilySpec {
                h0: *h0,
                lambda: *lambda,
                nu0: *nu0,
                delta: *delta,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for TolSpec {
    fn default() -> Self {
        TolSpec {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_events: Option<usize>,
}

/// Seed of one orbit drawn in a phase portrait.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSeed {
    pub x0: f64,
    /// Sheet of the seed: +1 starts with rising height, −1 with falling.
    pub eps: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePlotSpec {
    /// Which sheet's nullcline Γ_ε to draw.
    pub eps: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_view: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orbits: Vec<OrbitSeed>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub angular_res: usize,
    /// Emit the ℂ² coordinates of each vertex as comment attributes
    /// (Berger spheres only).
    #[serde(default)]
    pub berger_coords: bool,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            angular_res: 64,
            berger_coords: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSearchSpec {
    #[serde(rename = "H0")]
    pub h0: f64,
    pub x1: f64,
    pub delta: f64,
}

/// Top-level run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: AmbientSpace,
    pub h: HSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<ClassifySeed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_plot: Option<PhasePlotSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_search: Option<TorusSearchSpec>,
}

impl RunConfig {
    pub fn new(space: AmbientSpace, h: HSpec) -> Self {
        RunConfig {
            space,
            h,
            seed: None,
            tolerances: None,
            budget: None,
            phase_plot: None,
            mesh: None,
            torus_search: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
        Self::from_json(&text).map_err(|e| format!("cannot parse {path:?}: {e}"))
    }

    pub fn prescribed(&self) -> Result<PrescribedH, PrescribedError> {
        self.h.build()
    }

    pub fn tolerances_or_default(&self) -> TolSpec {
        self.tolerances.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_config() -> RunConfig {
        let mut cfg = RunConfig::new(
            AmbientSpace::new(0.0, 1.0).unwrap(),
            HSpec::Step {
                h0: 1.0,
                lambda: 2.5,
                nu0: -0.55,
                delta: 0.05,
            },
        );
        cfg.seed = Some(ClassifySeed::Y0 { x0: 1.5, eps: 1 });
        cfg.tolerances = Some(TolSpec::default());
        cfg.torus_search = Some(TorusSearchSpec {
            h0: 1.0,
            x1: 1.6,
            delta: 0.05,
        });
        cfg
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let cfg = sample_config();
        let text = cfg.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn h_spec_forms_parse() {
        for (text, ok) in [
            (r#"{"kind":"constant","H0":1.0}"#, true),
            (
                r#"{"kind":"table","knots":[[0.0,1.0],[0.5,1.2],[1.0,1.5]]}"#,
                true,
            ),
            (
                r#"{"kind":"step","H0":1.0,"lambda":3.0,"nu0":-0.5,"delta":0.1}"#,
                true,
            ),
            (r#"{"kind":"mystery"}"#, false),
        ] {
            let parsed: Result<HSpec, _> = serde_json::from_str(text);
            assert_eq!(parsed.is_ok(), ok, "{text}");
            if let Ok(spec) = parsed {
                assert!(spec.build().is_ok());
            }
        }
    }

    #[test]
    fn degenerate_space_requires_flag() {
        let text = r#"{"space":{"kappa":0.0,"tau":0.0},"h":{"kind":"constant","H0":1.0}}"#;
        assert!(RunConfig::from_json(text).is_err());
        let text = r#"{"space":{"kappa":0.0,"tau":0.0,"degenerate_ok":true},"h":{"kind":"constant","H0":1.0}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert!(cfg.space.degenerate_ok());
    }

    proptest! {
        #[test]
        fn random_configs_round_trip(kappa in -4.0f64..4.0, tau in 0.01f64..2.0, h0 in 0.5f64..3.0) {
            prop_assume!((kappa - 4.0 * tau * tau).abs() > 1e-6);
            let cfg = RunConfig::new(
                AmbientSpace::new(kappa, tau).unwrap(),
                HSpec::Constant { h0 },
            );
            let text = cfg.to_json();
            let back = RunConfig::from_json(&text).unwrap();
            prop_assert_eq!(back.clone(), cfg);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
