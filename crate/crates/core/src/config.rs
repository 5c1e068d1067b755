//! Run configuration: one JSON document holding every input of the pipeline.

use std::io::Read;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codesign::{CaseSpec, CodesignBounds, CostConfig, OptimizerSettings, Problem, RobotSettings};
use crate::dynamics::SimConfig;
use crate::error::{Error, Result};
use crate::gearbox::{GearboxBounds, GearboxKind, MotorSpec};
use crate::mass_models::{LinkMassParams, MaterialTable};
use crate::stage1::{ActuatorCatalog, RatioGrid};

/// The shipped default configuration.
pub const DEFAULT_CONFIG_JSON: &str = include_str!("../config/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub motor: MotorSpec,
    pub materials: MaterialTable,
    pub link: LinkMassParams,
    pub gearbox_bounds: GearboxBounds,
    pub ratio_grid: RatioGrid,
    pub sim: SimConfig,
    pub robot: RobotSettings,
    pub codesign_bounds: CodesignBounds,
    pub cost: CostConfig,
    pub optimizer: OptimizerSettings,
    pub case: CaseSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            motor: MotorSpec::default(),
            materials: MaterialTable::default(),
            link: LinkMassParams::default(),
            gearbox_bounds: GearboxBounds::default(),
            ratio_grid: RatioGrid::default(),
            sim: SimConfig::default(),
            robot: RobotSettings::default(),
            codesign_bounds: CodesignBounds::default(),
            cost: CostConfig::default(),
            optimizer: OptimizerSettings::default(),
            case: CaseSpec::preset(crate::codesign::CaseKind::C),
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Deserializes JSON, reporting the path of the offending field on failure.
pub fn from_reader_with_path<T: DeserializeOwned>(reader: impl Read, path: &Path) -> Result<T> {
    let mut de = serde_json::Deserializer::from_reader(reader);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_io() {
            Error::json(path, inner)
        } else {
            Error::invalid(format!("{}: {field}", path.display()), inner.to_string())
        }
    })
}

pub fn from_str_with_path<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    from_reader_with_path(text.as_bytes(), path)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: RunConfig = from_str_with_path(&text, path)?;
        config.validate()?;
        Ok(config)
    }

    pub fn shipped_default() -> Self {
        from_str_with_path(DEFAULT_CONFIG_JSON, Path::new("config/default.json"))
            .expect("shipped default config parses")
    }

    pub fn validate(&self) -> Result<()> {
        self.motor.validate()?;
        self.materials.validate()?;
        self.link.validate()?;
        self.gearbox_bounds.validate()?;
        self.ratio_grid.validate()?;
        self.sim.validate()?;
        self.robot.validate()?;
        self.codesign_bounds.validate()?;
        self.cost.validate()?;
        self.optimizer.validate()?;
        self.case.validate(&self.codesign_bounds)?;
        Ok(())
    }

    /// Stage-1 catalog for the configured motor, bounds and ratio grid.
    pub fn build_catalog(&self, kinds: &[GearboxKind]) -> ActuatorCatalog {
        crate::stage1::build_catalog(
            &self.motor,
            &self.gearbox_bounds,
            &self.materials,
            &self.ratio_grid,
            kinds,
        )
    }

    /// Stage-2 problem over `catalog` with this configuration's settings.
    pub fn problem<'a>(&'a self, catalog: &'a ActuatorCatalog) -> Problem<'a> {
        Problem {
            catalog,
            materials: &self.materials,
            link: &self.link,
            robot: &self.robot,
            sim: &self.sim,
            cost: &self.cost,
            bounds: &self.codesign_bounds,
        }
    }

    /// SHA-256 of the configuration with the seed and output directory left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.seed = 0;
        c.output_dir = PathBuf::new();
        sha256_json(&c)
    }

    /// SHA-256 of the inputs that determine the stage-1 catalog.
    pub fn catalog_hash(&self, kinds: &[GearboxKind]) -> String {
        #[derive(Serialize)]
        struct CatalogInputs<'a> {
            motor: &'a MotorSpec,
            materials: &'a MaterialTable,
            gearbox_bounds: &'a GearboxBounds,
            ratio_grid: &'a RatioGrid,
            kinds: Vec<GearboxKind>,
            version: &'a str,
        }
        let mut kinds = kinds.to_vec();
        kinds.sort();
        kinds.dedup();
        sha256_json(&CatalogInputs {
            motor: &self.motor,
            materials: &self.materials,
            gearbox_bounds: &self.gearbox_bounds,
            ratio_grid: &self.ratio_grid,
            kinds,
            version: env!("CARGO_PKG_VERSION"),
        })
    }
}

fn sha256_json(value: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_default_matches_code_defaults() {
        let shipped = RunConfig::shipped_default();
        shipped.validate().unwrap();
        assert_eq!(shipped, RunConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = from_str_with_path::<RunConfig>(r#"{"motor": {"mass": 1.0, "colour": 3}}"#, Path::new("x.json"))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("motor"), "{msg}");
        assert!(msg.contains("colour"), "{msg}");
        assert!(err.is_config_error());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let c: RunConfig = from_str_with_path(r#"{"seed": 9}"#, Path::new("x.json")).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.motor, MotorSpec::default());
        let c: RunConfig = from_str_with_path(r#"{"optimizer": {"max_generations": 6}}"#, Path::new("x.json")).unwrap();
        assert_eq!(c.optimizer.max_generations, 6);
        assert_eq!(c.optimizer.population, OptimizerSettings::default().population);
    }

    #[test]
    fn invalid_nested_value_rejected() {
        let mut c = RunConfig::default();
        c.motor.stator_inner_diameter = 100.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.case.values.l1 = 0.9;
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("l1"));
    }

    #[test]
    fn hash_ignores_seed_and_output() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.seed = 42;
        b.output_dir = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.cost.k_h = 31.0;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.catalog_hash(&GearboxKind::ALL), b.catalog_hash(&GearboxKind::ALL));
    }
}
