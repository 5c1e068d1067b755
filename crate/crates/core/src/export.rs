//! Parametric design manifest: every dimension a CAD template needs.
//!
//! Numeric keys carry their unit as a suffix. Actuator dimensions and
//! masses come from the same routines the mass model uses.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ControllerParams, RobotModel};
use crate::error::{Error, Result};
use crate::gearbox::{self, GearboxKind, MotorSpec};
use crate::mass_models::{self, ActuatorDesign, ActuatorDimensions, LinkMassParams, MaterialTable};

pub const MANIFEST_VERSION: &str = "1";

/// Key suffixes accepted on numeric manifest fields.
pub const UNIT_SUFFIXES: [&str; 13] = [
    "_mm",
    "_m",
    "_kg",
    "_Nm",
    "_N_per_m",
    "_Ns_per_m",
    "_Nm_per_rad",
    "_rad",
    "_kgm2",
    "_teeth",
    "_count",
    "_ratio",
    "_id",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed_id: u64,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(config_sha256: impl Into<String>, seed: u64) -> Self {
        Provenance {
            config_sha256: config_sha256.into(),
            seed_id: seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkManifest {
    pub thigh_length_m: f64,
    pub thigh_mass_kg: f64,
    pub shank_length_m: f64,
    pub shank_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct MotorManifest {
    pub name: String,
    pub mass_kg: f64,
    pub outer_diameter_mm: f64,
    pub stator_inner_diameter_mm: f64,
    pub axial_length_mm: f64,
    pub peak_torque_Nm: f64,
    pub rotor_inertia_kgm2: f64,
}

impl From<&MotorSpec> for MotorManifest {
    fn from(m: &MotorSpec) -> Self {
        MotorManifest {
            name: m.name.clone(),
            mass_kg: m.mass,
            outer_diameter_mm: m.outer_diameter,
            stator_inner_diameter_mm: m.stator_inner_diameter,
            axial_length_mm: m.axial_length,
            peak_torque_Nm: m.peak_torque,
            rotor_inertia_kgm2: m.rotor_inertia,
        }
    }
}

impl MotorManifest {
    pub fn to_spec(&self) -> MotorSpec {
        MotorSpec {
            name: self.name.clone(),
            mass: self.mass_kg,
            outer_diameter: self.outer_diameter_mm,
            stator_inner_diameter: self.stator_inner_diameter_mm,
            axial_length: self.axial_length_mm,
            peak_torque: self.peak_torque_Nm,
            rotor_inertia: self.rotor_inertia_kgm2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentMasses {
    pub motor_kg: f64,
    pub sun_gear_kg: f64,
    pub planet_gears_kg: f64,
    pub ring_gear_kg: f64,
    pub carrier_kg: f64,
    pub casing_kg: f64,
    pub backplate_kg: f64,
    pub coupling_kg: f64,
    pub bearings_kg: f64,
    pub total_kg: f64,
}

impl From<&mass_models::MassBreakdown> for ComponentMasses {
    fn from(b: &mass_models::MassBreakdown) -> Self {
        ComponentMasses {
            motor_kg: b.motor,
            sun_gear_kg: b.sun_gear,
            planet_gears_kg: b.planet_gears,
            ring_gear_kg: b.ring_gear,
            carrier_kg: b.carrier,
            casing_kg: b.casing,
            backplate_kg: b.backplate,
            coupling_kg: b.coupling,
            bearings_kg: b.bearings,
            total_kg: b.total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ActuatorManifest {
    pub kind: GearboxKind,
    pub sun_teeth: u32,
    pub planet_teeth: u32,
    pub ring_teeth: u32,
    pub module_mm: f64,
    pub planet_count: u32,
    pub gear_ratio: f64,
    pub peak_torque_Nm: f64,
    pub dimensions: ActuatorDimensions,
    pub masses: ComponentMasses,
    pub motor: MotorManifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorPair {
    pub hip: ActuatorManifest,
    pub knee: ActuatorManifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ControllerManifest {
    pub K_N_per_m: f64,
    pub C_Ns_per_m: f64,
    pub T_Nm_per_rad: f64,
    pub l0_m: f64,
    pub alpha0_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyManifest {
    pub base_mass_kg: f64,
    pub total_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignManifest {
    pub manifest_version: String,
    pub links: LinkManifest,
    pub actuators: ActuatorPair,
    pub controller: ControllerManifest,
    pub body: BodyManifest,
    pub provenance: Provenance,
}

fn actuator_manifest(design: &ActuatorDesign, materials: &MaterialTable) -> Result<ActuatorManifest> {
    let gt = &design.gear_train;
    let breakdown = mass_models::actuator_mass(gt, design.kind, &design.motor, materials)?;
    Ok(ActuatorManifest {
        kind: design.kind,
        sun_teeth: gt.sun_teeth,
        planet_teeth: gt.planet_teeth,
        ring_teeth: gt.ring_teeth,
        module_mm: gt.module_mm,
        planet_count: gt.planet_count,
        gear_ratio: gearbox::gear_ratio(gt),
        peak_torque_Nm: gearbox::gear_ratio(gt) * design.motor.peak_torque,
        dimensions: mass_models::derive_dimensions(gt, design.kind, &design.motor, &materials.geometry),
        masses: ComponentMasses::from(&breakdown),
        motor: MotorManifest::from(&design.motor),
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn compare(out: &mut Vec<String>, field: &str, given: f64, expected: f64) {
    if !close(given, expected) {
        out.push(format!("{field} (given {given}, expected {expected})"));
    }
}

/// Assembles the manifest after checking that the model, controller and
/// actuator designs describe the same robot.
pub fn build_manifest(
    model: &RobotModel,
    params: &ControllerParams,
    hip: &ActuatorDesign,
    knee: &ActuatorDesign,
    link: &LinkMassParams,
    materials: &MaterialTable,
    provenance: Provenance,
) -> Result<DesignManifest> {
    let mut bad = Vec::new();
    for (name, design, joint) in [("hip", hip, &model.hip), ("knee", knee, &model.knee)] {
        let mass = mass_models::actuator_mass(&design.gear_train, design.kind, &design.motor, materials)?.total;
        let ratio = gearbox::gear_ratio(&design.gear_train);
        compare(&mut bad, &format!("{name}.mass"), design.mass, mass);
        compare(&mut bad, &format!("{name}.ratio"), design.ratio, ratio);
        compare(
            &mut bad,
            &format!("{name}.peak_torque"),
            design.peak_torque,
            ratio * design.motor.peak_torque,
        );
        compare(&mut bad, &format!("model.{name}.mass"), joint.mass, mass);
        compare(
            &mut bad,
            &format!("model.{name}.peak_torque"),
            joint.peak_torque,
            design.peak_torque,
        );
        compare(&mut bad, &format!("model.{name}.ratio"), joint.ratio, ratio);
    }
    let thigh = mass_models::link_mass(model.l1, link, materials)?;
    let shank = mass_models::link_mass(model.l2, link, materials)?;
    compare(&mut bad, "model.thigh_mass", model.thigh_mass, thigh);
    compare(&mut bad, "model.shank_mass", model.shank_mass, shank);
    if !bad.is_empty() {
        return Err(Error::Inconsistent(bad));
    }
    Ok(DesignManifest {
        manifest_version: MANIFEST_VERSION.to_string(),
        links: LinkManifest {
            thigh_length_m: model.l1,
            thigh_mass_kg: thigh,
            shank_length_m: model.l2,
            shank_mass_kg: shank,
        },
        actuators: ActuatorPair {
            hip: actuator_manifest(hip, materials)?,
            knee: actuator_manifest(knee, materials)?,
        },
        controller: ControllerManifest {
            K_N_per_m: params.k,
            C_Ns_per_m: params.c,
            T_Nm_per_rad: params.t,
            l0_m: params.l0,
            alpha0_rad: params.alpha0,
        },
        body: BodyManifest {
            base_mass_kg: model.base_mass,
            total_mass_kg: model.total_mass(),
        },
        provenance,
    })
}

/// Recomputes every derived quantity from the manifest's own gear trains,
/// motors and link lengths and lists the fields that disagree.
pub fn verify_manifest(manifest: &DesignManifest, link: &LinkMassParams, materials: &MaterialTable) -> Result<()> {
    let mut bad = Vec::new();
    for (name, a) in [("hip", &manifest.actuators.hip), ("knee", &manifest.actuators.knee)] {
        let gt = match gearbox::GearTrain::new(a.sun_teeth, a.planet_teeth, a.ring_teeth, a.module_mm, a.planet_count) {
            Ok(gt) => gt,
            Err(e) => {
                bad.push(format!("actuators.{name}: {e}"));
                continue;
            }
        };
        let motor = a.motor.to_spec();
        let design = ActuatorDesign {
            gear_train: gt,
            kind: a.kind,
            mass: 0.0,
            peak_torque: 0.0,
            ratio: 0.0,
            motor,
        };
        let expect = match actuator_manifest(&design, materials) {
            Ok(m) => m,
            Err(e) => {
                bad.push(format!("actuators.{name}: {e}"));
                continue;
            }
        };
        if expect == *a {
            continue;
        }
        let given = serde_json::to_value(a).expect("manifest serializes");
        let want = serde_json::to_value(&expect).expect("manifest serializes");
        diff_values(&format!("actuators.{name}"), &given, &want, &mut bad);
    }
    for (field, len, mass) in [
        (
            "links.thigh_mass_kg",
            manifest.links.thigh_length_m,
            manifest.links.thigh_mass_kg,
        ),
        (
            "links.shank_mass_kg",
            manifest.links.shank_length_m,
            manifest.links.shank_mass_kg,
        ),
    ] {
        match mass_models::link_mass(len, link, materials) {
            Ok(m) => compare(&mut bad, field, mass, m),
            Err(e) => bad.push(format!("{field}: {e}")),
        }
    }
    let total = manifest.body.base_mass_kg
        + manifest.actuators.hip.masses.total_kg
        + manifest.actuators.knee.masses.total_kg
        + manifest.links.thigh_mass_kg
        + manifest.links.shank_mass_kg;
    compare(&mut bad, "body.total_mass_kg", manifest.body.total_mass_kg, total);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Inconsistent(bad))
    }
}

fn diff_values(path: &str, given: &serde_json::Value, want: &serde_json::Value, out: &mut Vec<String>) {
    use serde_json::Value;
    match (given, want) {
        (Value::Object(g), Value::Object(w)) => {
            for (k, wv) in w {
                if let Some(gv) = g.get(k) {
                    diff_values(&format!("{path}.{k}"), gv, wv, out);
                }
            }
        }
        (Value::Number(g), Value::Number(w)) => {
            let (g, w) = (g.as_f64().unwrap_or(f64::NAN), w.as_f64().unwrap_or(f64::NAN));
            compare(out, path, g, w);
        }
        _ if given != want => out.push(format!("{path} (given {given}, expected {want})")),
        _ => {}
    }
}

pub fn write_manifest(manifest: &DesignManifest, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, manifest).map_err(|e| Error::json(path, e))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a manifest; schema violations name the offending field path.
pub fn read_manifest(path: &Path) -> Result<DesignManifest> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    crate::config::from_reader_with_path(BufReader::new(file), path)
}

/// Numeric leaf keys that lack a unit suffix.
pub fn keys_without_units(value: &serde_json::Value) -> Vec<String> {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut Vec<String>) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, child) in map {
                    let path = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    if child.is_number() && !UNIT_SUFFIXES.iter().any(|s| k.ends_with(s)) {
                        out.push(path.clone());
                    }
                    walk(&path, child, out);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), child, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}
