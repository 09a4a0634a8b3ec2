//! Scenario files: JSON, unknown keys rejected, defaults filled on load.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::path::{Path, PathBuf};

use dirac_fluid::fluid::Branch;
use dirac_fluid::initial::{
    check_periodic_k, gaussian_packet, plane_wave, rest_state, EnergyBranch, GaussianPacket, SpinMixture,
};
use dirac_fluid::lattice::{io::read_complex, make_grid, DerivativeOrder, GridSpec};
use dirac_fluid::{DiracState64, Grid64, PhysParams64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Minimum number of grid points per shortest resolved wavelength.
pub const POINTS_PER_WAVELENGTH: f64 = 16.0;

/// Gaussian spectra are treated as reaching `|k| + GAUSSIAN_TAIL / width`.
pub const GAUSSIAN_TAIL: f64 = 3.0;

/// Initial-data recipes, selected by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Recipe {
    // a struct variant so that stray keys are rejected
    RestState {},
    PlaneWave {
        k: [f64; 3],
        #[serde(default)]
        spin: SpinMixture<f64>,
        #[serde(default)]
        branch: EnergyBranch,
    },
    GaussianPacket(GaussianPacket<f64>),
    /// Bispinor snapshot in the complex CSV layout (4 components), read relative to the working directory.
    Custom {
        path: PathBuf,
    },
}

impl Recipe {
    pub const NAMES: [(&'static str, &'static str); 4] = [
        ("rest_state", "uniform spin-up rest solution"),
        ("plane_wave", "single-momentum positive or negative energy wave"),
        ("gaussian_packet", "positive-energy Gaussian packet with carrier momentum"),
        ("custom", "bispinor read from a complex CSV snapshot"),
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solvers {
    Dirac,
    Reduced,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// Full vs reduced discrepancy; needs both solvers.
    Equivalence,
    Conservation,
    /// Lagrangian identity residuals; needs the fluid map.
    Identities,
    /// Volume integrals of every Lagrangian density; needs the fluid map.
    Lagrangians,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 4] = [Self::Equivalence, Self::Conservation, Self::Identities, Self::Lagrangians];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pipeline {
    #[serde(default)]
    pub solvers: Solvers,
    #[serde(default = "yes")]
    pub fluid: bool,
    #[serde(default = "all_diagnostics")]
    pub diagnostics: Vec<Diagnostic>,
}

fn yes() -> bool {
    true
}

fn all_diagnostics() -> Vec<Diagnostic> {
    Diagnostic::ALL.to_vec()
}

fn one() -> usize {
    1
}

impl Default for Pipeline {
    fn default() -> Self {
        Self { solvers: Solvers::default(), fluid: true, diagnostics: all_diagnostics() }
    }
}

impl Pipeline {
    pub fn wants(&self, d: Diagnostic) -> bool {
        self.diagnostics.contains(&d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec<f64>,
    #[serde(default)]
    pub params: PhysParams64,
    pub recipe: Recipe,
    /// Run length in time units (`x0 = c t`).
    pub duration: f64,
    /// Record every n-th step; the final step is always recorded.
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub pipeline: Pipeline,
    /// Root of the α quadratic used by the fluid map.
    #[serde(default)]
    pub branch: Branch,
    #[serde(default)]
    pub derivative_order: DerivativeOrder,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {msg}"))
}

impl Scenario {
    /// Deserializes and validates a JSON value.
    pub fn from_value(value: Value) -> Result<Self, CliError> {
        let scenario: Scenario = serde_json::from_value(value).map_err(|e| CliError::Validation(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn grid(&self) -> Result<Grid64, CliError> {
        make_grid(&self.grid, self.params.c).map_err(|e| invalid("grid", e))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty() || !self.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
            return Err(invalid("name", "must be a non-empty identifier of [A-Za-z0-9_-]"));
        }
        self.params.validate().map_err(|e| invalid("params", e))?;
        let grid = self.grid()?;
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid("duration", "must be positive and finite"));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every", "must be at least 1"));
        }
        if self.pipeline.wants(Diagnostic::Equivalence) && self.pipeline.solvers != Solvers::Both {
            return Err(invalid("pipeline.diagnostics", "equivalence needs pipeline.solvers = both"));
        }
        for d in [Diagnostic::Identities, Diagnostic::Lagrangians] {
            if self.pipeline.wants(d) && !self.pipeline.fluid {
                return Err(invalid("pipeline.diagnostics", format!("{d:?} needs pipeline.fluid = true").to_lowercase()));
            }
        }
        let dx = grid.spacing();
        let resolvable = |key: &str, kmax: [f64; 3]| -> Result<(), CliError> {
            for axis in 0..grid.dims() {
                if kmax[axis] > 0.0 {
                    let points = 2.0 * PI / kmax[axis] / dx[axis];
                    if points < POINTS_PER_WAVELENGTH {
                        return Err(invalid(
                            key,
                            format!("{points:.1} points per shortest wavelength on axis {axis}, need {POINTS_PER_WAVELENGTH}"),
                        ));
                    }
                }
            }
            Ok(())
        };
        let spin_ok = |key: &str, spin: &SpinMixture<f64>| -> Result<(), CliError> {
            if !(0.0..=FRAC_PI_2).contains(&spin.angle) {
                return Err(invalid(&format!("{key}.angle"), "must lie in [0, pi/2]"));
            }
            if !spin.phase.is_finite() {
                return Err(invalid(&format!("{key}.phase"), "must be finite"));
            }
            Ok(())
        };
        match &self.recipe {
            Recipe::RestState {} | Recipe::Custom { .. } => {}
            Recipe::PlaneWave { k, spin, .. } => {
                spin_ok("recipe.spin", spin)?;
                resolvable("recipe.k", k.map(f64::abs))?;
                check_periodic_k(&grid, *k).map_err(|e| invalid("recipe.k", e))?;
            }
            Recipe::GaussianPacket(p) => {
                spin_ok("recipe.spin", &p.spin)?;
                if !(p.width > 0.0 && p.width.is_finite()) {
                    return Err(invalid("recipe.width", "must be positive and finite"));
                }
                if p.center.iter().chain(&p.k).any(|x| !x.is_finite()) {
                    return Err(invalid("recipe", "center and k must be finite"));
                }
                for axis in grid.dims()..3 {
                    if p.k[axis] != 0.0 {
                        return Err(invalid("recipe.k", format!("component {axis} must be 0 on a {}-d grid", grid.dims())));
                    }
                }
                resolvable("recipe.width", p.k.map(|ka| ka.abs() + GAUSSIAN_TAIL / p.width))?;
            }
        }
        Ok(())
    }
}

/// Reads a scenario file and applies `key=value` overrides before validation.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    Scenario::from_value(value)
}

/// Sets a dotted path (`grid.points.0=128`, `params.hbar=2`). The value is
/// parsed as JSON and kept as a string when that fails. Missing object keys
/// are created; array indices must exist.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| invalid(spec, "override must look like key=value"))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(invalid(path, "empty path segment"));
    }
    let new = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = root;
    for (depth, key) in keys.iter().enumerate() {
        let here = keys[..=depth].join(".");
        cur = match cur {
            Value::Object(map) => map.entry(key.to_string()).or_insert(Value::Null),
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| invalid(&here, "expected an array index"))?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| invalid(&here, format!("index out of range (length {len})")))?
            }
            Value::Null => {
                *cur = Value::Object(Default::default());
                match cur {
                    Value::Object(map) => map.entry(key.to_string()).or_insert(Value::Null),
                    _ => unreachable!(),
                }
            }
            _ => return Err(invalid(&here, "parent is not an object or array")),
        };
    }
    *cur = new;
    Ok(())
}

/// Initial bispinor at `x0 = 0` for a validated scenario.
pub fn build_initial(scenario: &Scenario) -> Result<DiracState64, CliError> {
    let grid = scenario.grid()?;
    let params = &scenario.params;
    let state = match &scenario.recipe {
        Recipe::RestState {} => Ok(rest_state(&grid)),
        Recipe::PlaneWave { k, spin, branch } => plane_wave(&grid, *k, *spin, *branch, params),
        Recipe::GaussianPacket(p) => gaussian_packet(&grid, p, params, scenario.derivative_order),
        Recipe::Custom { path } => {
            let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let field = read_complex(file, &grid).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            DiracState64::from_bispinor(&field, 0.0)
        }
    };
    state.map_err(|e| invalid("recipe", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({"name": "rest", "grid": {"extents": [1.0], "points": [16]}, "recipe": {"kind": "rest_state"}, "duration": 0.5})
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let s = Scenario::from_value(minimal()).unwrap();
        assert_eq!(s.params, PhysParams64::natural());
        assert_eq!(s.record_every, 1);
        assert_eq!(s.pipeline, Pipeline::default());
        assert_eq!(s.branch, Branch::default());
        assert_eq!(s.derivative_order, DerivativeOrder::Second);
    }

    #[test]
    fn unknown_keys_are_named() {
        let mut v = minimal();
        v["grid"]["spacing"] = json!(0.1);
        let err = Scenario::from_value(v).unwrap_err().to_string();
        assert!(err.contains("spacing"), "{err}");
        let mut v = minimal();
        v["params"] = json!({"hbar": 1.0, "m": 1.0, "c": 1.0, "mass": 2.0});
        assert!(Scenario::from_value(v).unwrap_err().to_string().contains("mass"));
        let mut v = minimal();
        v["recipe"] = json!({"kind": "gaussian_packet", "center": [0.5, 0, 0], "width": 0.2, "sigma": 1});
        assert!(Scenario::from_value(v).unwrap_err().to_string().contains("sigma"));
        let mut v = minimal();
        v["recipe"]["spin"] = json!({"angle": 0.1});
        assert!(Scenario::from_value(v).unwrap_err().to_string().contains("spin"));
    }

    #[test]
    fn under_resolved_plane_wave_is_rejected() {
        // 4 points per wavelength
        let mut v = minimal();
        v["grid"] = json!({"extents": [8.0], "points": [8]});
        v["recipe"] = json!({"kind": "plane_wave", "k": [2.0 * PI / 4.0, 0, 0]});
        let err = Scenario::from_value(v.clone()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().starts_with("recipe.k"), "{err}");
        v["grid"]["points"] = json!([32]);
        Scenario::from_value(v).unwrap();
    }

    #[test]
    fn spin_angle_and_width_gates() {
        let mut v = minimal();
        v["grid"] = json!({"extents": [20.0], "points": [256]});
        v["recipe"] = json!({"kind": "gaussian_packet", "center": [10, 0, 0], "width": 1.0, "k": [1, 0, 0],
                             "spin": {"angle": 2.0}});
        assert!(Scenario::from_value(v.clone()).unwrap_err().to_string().starts_with("recipe.spin.angle"));
        v["recipe"]["spin"]["angle"] = json!(0.3);
        Scenario::from_value(v.clone()).unwrap();
        v["recipe"]["width"] = json!(0.1);
        assert!(Scenario::from_value(v).unwrap_err().to_string().starts_with("recipe.width"));
    }

    #[test]
    fn diagnostics_need_their_pipelines() {
        let mut v = minimal();
        v["pipeline"] = json!({"solvers": "dirac"});
        assert!(Scenario::from_value(v.clone()).unwrap_err().to_string().contains("equivalence"));
        v["pipeline"]["diagnostics"] = json!(["conservation"]);
        Scenario::from_value(v).unwrap();
    }

    #[test]
    fn overrides_follow_dotted_paths() {
        let mut v = minimal();
        apply_override(&mut v, "grid.points.0=32").unwrap();
        apply_override(&mut v, "params.hbar=2").unwrap();
        apply_override(&mut v, "name=renamed").unwrap();
        assert_eq!(v["grid"]["points"][0], json!(32));
        assert_eq!(v["params"]["hbar"], json!(2));
        assert_eq!(v["name"], json!("renamed"));
        assert!(apply_override(&mut v, "grid.points.3=1").unwrap_err().to_string().starts_with("grid.points.3"));
        assert!(apply_override(&mut v, "name.x=1").is_err());
        assert!(apply_override(&mut v, "novalue").is_err());
        // params.m is still missing, so validation names it
        assert!(Scenario::from_value(v).unwrap_err().to_string().contains("`m`"));
    }

    #[test]
    fn full_config_round_trips() {
        let v = json!({
            "name": "packet",
            "grid": {"extents": [20.0, 10.0], "points": [128, 32], "dt": 0.05, "cfl_factor": 0.5},
            "params": {"hbar": 1.0, "m": 2.0, "c": 1.5,
                       "tolerances": {"density_rel": 1e-10, "beta_rel": 1e-9, "instability_growth": 5.0}},
            "recipe": {"kind": "gaussian_packet", "center": [10, 5, 0], "width": 3.0, "k": [0.5, 0, 0],
                       "spin": {"angle": 0.4, "phase": 1.0}},
            "duration": 1.0,
            "record_every": 4,
            "pipeline": {"solvers": "both", "fluid": true, "diagnostics": ["conservation", "identities"]},
            "branch": "minus",
            "derivative_order": 4
        });
        let a = Scenario::from_value(v).unwrap();
        let b = Scenario::from_value(serde_json::to_value(&a).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<Scenario>(&text).unwrap(), a);
    }

    #[test]
    fn plane_wave_closure_ratio() {
        let mut v = minimal();
        v["grid"] = json!({"extents": [4.0 * PI], "points": [64]});
        v["recipe"] = json!({"kind": "plane_wave", "k": [0.5, 0, 0]});
        let s = build_initial(&Scenario::from_value(v.clone()).unwrap()).unwrap();
        let ratio = s.psi2.component(1)[3].norm() / s.psi1.component(0)[3].norm();
        let expect = 0.5 / (1.25f64.sqrt() + 1.0);
        assert!((ratio - expect).abs() < 1e-12, "{ratio}");
        assert!((expect - 0.236068).abs() < 1e-6);

        v["recipe"]["k"] = json!([0, 0, 0]);
        let s = build_initial(&Scenario::from_value(v).unwrap()).unwrap();
        assert!(s.psi2.component(0).iter().chain(s.psi2.component(1)).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn custom_recipe_reads_a_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.csv");
        let mut v = minimal();
        v["recipe"] = json!({"kind": "gaussian_packet", "center": [0.5, 0, 0], "width": 0.3});
        v["grid"]["points"] = json!([64]);
        let packet = build_initial(&Scenario::from_value(v.clone()).unwrap()).unwrap();
        dirac_fluid::lattice::io::write_complex(File::create(&path).unwrap(), &packet.bispinor()).unwrap();
        v["recipe"] = json!({"kind": "custom", "path": path});
        let read = build_initial(&Scenario::from_value(v.clone()).unwrap()).unwrap();
        assert!(read.sup_distance(&packet) < 1e-15);

        v["recipe"] = json!({"kind": "custom", "path": dir.path().join("missing.csv")});
        assert_eq!(build_initial(&Scenario::from_value(v).unwrap()).unwrap_err().exit_code(), 3);
    }
}
