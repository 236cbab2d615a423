//! Scenario files: TOML documents describing one run.
//!
//! ```toml
//! name = "fig2-tau10"
//! command = "equilibria"
//! substrate_file = "substrate_silica_approx.toml"
//!
//! [system]
//! gap = 3e-7
//! t1 = 300.0
//! t2 = 600.0
//! t_env = 300.0
//!
//! [system.slab1]
//! thickness = 5e-6
//! layer = { kind = "lorentz-drude", strength = 3.0, resonance = 1e13, damping = 1e11,
//!           core_strength = 1.0, core_resonance = 1e16, core_damping = 5e14, dilution = 10.0 }
//! ```
//!
//! Slabs without an inline `substrate` take the model of `substrate_file`,
//! resolved relative to the scenario file. Unknown keys are rejected.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use fluctoforce::{LayeredSlab, Material, OscillatorModel, ScanOptions, SolverSettings, SweepAxis, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pressure,
    Sweep,
    Equilibria,
    ReproduceFig,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Pressure => "pressure",
            Command::Sweep => "sweep",
            Command::Equilibria => "equilibria",
            Command::ReproduceFig => "reproduce-fig",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substrate_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<ScanOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureSpec>,
    #[serde(default)]
    pub quadrature: QuadratureOverrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub slab1: SlabSpec,
    pub slab2: SlabSpec,
    pub gap: f64,
    pub t1: f64,
    pub t2: f64,
    pub t_env: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabSpec {
    pub layer: Material,
    pub thickness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substrate: Option<Material>,
    #[serde(default = "yes")]
    pub outer_face_blackened: bool,
}

fn yes() -> bool {
    true
}

impl SlabSpec {
    fn resolve(&self, fallback: Option<&OscillatorModel>, which: &str) -> Result<LayeredSlab, CliError> {
        let substrate = match (self.substrate, fallback) {
            (Some(m), _) => m,
            (None, Some(model)) => Material::lorentz_drude(*model),
            (None, None) => {
                return Err(CliError::Config(format!(
                    "{which} has no substrate and the scenario names no substrate_file"
                )))
            }
        };
        Ok(LayeredSlab {
            layer: self.layer,
            thickness: self.thickness,
            substrate,
            outer_face_blackened: self.outer_face_blackened,
        })
    }
}

impl From<&SystemConfig> for SystemSpec {
    fn from(c: &SystemConfig) -> Self {
        let slab = |s: &LayeredSlab| SlabSpec {
            layer: s.layer,
            thickness: s.thickness,
            substrate: Some(s.substrate),
            outer_face_blackened: s.outer_face_blackened,
        };
        SystemSpec {
            slab1: slab(&c.slab1),
            slab2: slab(&c.slab2),
            gap: c.gap,
            t1: c.t1,
            t2: c.t2,
            t_env: c.t_env,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => fluctoforce::analysis::log_grid(self.start, self.stop, self.points),
            Spacing::Linear => linear_grid(self.start, self.stop, self.points),
        }
    }
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => lo + (hi - lo) * i as f64 / (points - 1) as f64,
        })
        .collect()
}

/// Sweep axis and its values, given either explicitly or as a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeSpec>,
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, &self.range) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some(r)) => Ok(r.values()),
            _ => Err(CliError::Config(
                "[sweep] needs exactly one of `values` or `range`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    pub number: u8,
    /// Points per curve; each figure has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Grid points of the equilibrium scans of figures 2 and 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_points: Option<usize>,
}

/// Optional replacements for the solver defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evanescent_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance_window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matsubara_tail_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_matsubara_terms: Option<usize>,
}

impl QuadratureOverrides {
    /// Every field set from `s`.
    pub fn pinned(s: &SolverSettings) -> Self {
        Self {
            rel_tol: Some(s.rel_tol),
            max_subdivisions: Some(s.max_subdivisions),
            omega_cutoff: Some(s.omega_cutoff),
            omega_floor: Some(s.omega_floor),
            evanescent_cutoff: Some(s.evanescent_cutoff),
            resonance_window: Some(s.resonance_window),
            matsubara_tail_tol: Some(s.matsubara_tail_tol),
            max_matsubara_terms: Some(s.max_matsubara_terms),
        }
    }

    /// Solver settings; `rel_tol` (from the command line) beats the file.
    pub fn settings(&self, rel_tol: Option<f64>) -> Result<SolverSettings, CliError> {
        let tol = rel_tol.or(self.rel_tol);
        let mut s = tol.map_or_else(SolverSettings::default, SolverSettings::with_rel_tol);
        if let Some(v) = self.max_subdivisions {
            s.max_subdivisions = v;
        }
        if let Some(v) = self.omega_cutoff {
            s.omega_cutoff = v;
        }
        if let Some(v) = self.omega_floor {
            s.omega_floor = v;
        }
        if let Some(v) = self.evanescent_cutoff {
            s.evanescent_cutoff = v;
        }
        if let Some(v) = self.resonance_window {
            s.resonance_window = v;
        }
        if rel_tol.is_none() {
            if let Some(v) = self.matsubara_tail_tol {
                s.matsubara_tail_tol = v;
            }
        }
        if let Some(v) = self.max_matsubara_terms {
            s.max_matsubara_terms = v;
        }
        if !(s.rel_tol > 0.0 && s.rel_tol < 1.0) {
            return Err(CliError::Config(format!(
                "rel_tol must be in (0, 1), got {}",
                s.rel_tol
            )));
        }
        Ok(s)
    }
}

/// Substrate model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstrateFile {
    pub description: String,
    /// Set when the parameters are placeholders rather than fitted data.
    #[serde(default)]
    pub approximate: bool,
    pub model: OscillatorModel,
}

impl SubstrateFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let file: SubstrateFile =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        file.model
            .validate()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(file)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A parsed scenario together with the directory it was read from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
}

impl LoadedScenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let scenario = Scenario::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { scenario, base_dir })
    }

    pub fn substrate(&self) -> Result<Option<SubstrateFile>, CliError> {
        match &self.scenario.substrate_file {
            Some(p) => SubstrateFile::load(&self.base_dir.join(p)).map(Some),
            None => Ok(None),
        }
    }

    /// The `[system]` table with substrates filled in and validated.
    pub fn system(&self) -> Result<SystemConfig, CliError> {
        let spec = self
            .scenario
            .system
            .ok_or_else(|| CliError::Config("scenario has no [system] table".into()))?;
        let substrate = self.substrate()?;
        let model = substrate.as_ref().map(|s| &s.model);
        let cfg = SystemConfig {
            slab1: spec.slab1.resolve(model, "slab1")?,
            slab2: spec.slab2.resolve(model, "slab2")?,
            gap: spec.gap,
            t1: spec.t1,
            t2: spec.t2,
            t_env: spec.t_env,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks the `command` key, if present, against the one requested.
    pub fn check_command(&self, requested: Command) -> Result<(), CliError> {
        match self.command {
            Some(c) if c != requested => Err(CliError::Config(format!(
                "scenario `{}` is a `{c}` scenario, not `{requested}`",
                self.name
            ))),
            _ => Ok(()),
        }
    }
}
