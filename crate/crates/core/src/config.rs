//! Serializable run description: every parameter of an evaluation or optimization run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::WorkingMode;
use crate::model::{ActuatorStiffness, Bounds, Material, Wrench};
use crate::moga::{MogaConfig, Problem};
use crate::performance::{CharacteristicLength, Criteria, DexterityConfig, StiffnessThresholds};
use crate::stiffness::StiffnessModel;
use crate::workspace::{GridSpec, WorkspaceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Directory receiving reports and CSV exports.
    pub output_dir: PathBuf,
    /// Evaluation threads; 0 lets the runtime choose.
    pub threads: usize,
    /// Bisection tolerance on the workspace radius, m.
    pub tolerance: f64,
    pub bounds: Bounds,
    pub material: Material,
    pub actuators: ActuatorStiffness,
    pub dexterity: DexterityConfig,
    pub thresholds: StiffnessThresholds,
    pub wrench: Wrench,
    pub working_mode: WorkingMode,
    pub workspace: WorkspaceSpec,
    pub grid: GridSpec,
    pub moga: MogaConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output_dir: PathBuf::from("out"),
            threads: 0,
            tolerance: 1e-3,
            bounds: Bounds::default(),
            material: Material::steel(),
            actuators: ActuatorStiffness::default(),
            dexterity: DexterityConfig::default(),
            thresholds: StiffnessThresholds::default(),
            wrench: Wrench::default(),
            working_mode: WorkingMode::default(),
            workspace: WorkspaceSpec::default(),
            grid: GridSpec::default(),
            moga: MogaConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

const HEADER: &str = "\
# Run configuration. Every key is optional; omitted sections take these defaults,
# but a section that is present must be complete.
#
# Lengths in m, stiffness in N/m or N·m/rad, angles in rad, wrench in N and N·m.
# dexterity.characteristic_length: { policy = \"home_optimal\" } or { policy = \"fixed\", value = <m> }.
# moga: the operator probabilities leave 1 - p_directional_crossover - p_selection - p_mutation
#       to one-point crossover; p_selection copies a tournament winner unchanged.
# moga.doe: \"sobol\" or \"latin\". Budget = population × generations, generation 0 being the DOE.
# working_mode: branch per leg, \"PLUS\" or \"MINUS\".
# workspace.radius is the starting cylinder only; optimize and evaluate search for the largest one.
";

impl RunConfig {
    /// Parses TOML; error messages carry the dotted path of the offending key.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Parse {
            path: String::from("."),
            message: e.to_string(),
        })?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let message = e.inner().message().to_string();
            let mut path = e.path().to_string();
            if let Some(field) = message.strip_prefix("missing field `").and_then(|m| m.strip_suffix('`')) {
                path = if path == "." { field.to_string() } else { format!("{path}.{field}") };
            }
            ConfigError::Parse { path, message }
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_toml(&text)
    }

    /// Commented TOML listing every default.
    pub fn defaults_toml() -> String {
        let body = toml::to_string_pretty(&RunConfig::default()).expect("defaults serialize");
        format!("{HEADER}\n{body}")
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if let Err(e) = self.bounds.check() {
            return invalid(e.to_string());
        }
        if let Err(e) = self.material.check() {
            return invalid(e.to_string());
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return invalid(format!("tolerance must be positive, got {}", self.tolerance));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.actuators.prismatic) && positive(self.actuators.revolute)) {
            return invalid("actuator stiffness must be positive".into());
        }
        if let CharacteristicLength::Fixed(v) = self.dexterity.characteristic_length {
            if !positive(v) {
                return invalid(format!("fixed characteristic length must be positive, got {v}"));
            }
        }
        if !self.wrench.is_finite() {
            return invalid("wrench components must be finite".into());
        }
        if !self.workspace.is_valid() {
            return invalid("workspace needs a finite center and a positive rotation range".into());
        }
        if !self.grid.is_valid() {
            return invalid("grid needs n_radial ≥ 1, n_angular ≥ 2, n_orientation ≥ 2".into());
        }
        self.moga.check().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn criteria(&self) -> Criteria {
        Criteria {
            dexterity: self.dexterity,
            thresholds: self.thresholds,
            stiffness: StiffnessModel {
                material: self.material,
                actuators: self.actuators,
            },
            wrench: self.wrench,
            mode: self.working_mode,
        }
    }

    pub fn problem(&self) -> Problem {
        Problem {
            bounds: self.bounds,
            material: self.material,
            criteria: self.criteria(),
            workspace: self.workspace,
            grid: self.grid,
            tolerance: self.tolerance,
        }
    }
}
