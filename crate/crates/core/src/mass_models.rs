//! Component mass models for actuators and leg links.
//!
//! Every actuator dimension is derived from the motor and the gear train by
//! [`derive_dimensions`]; both the mass model and the design manifest read
//! from that one routine.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gearbox::{self, GearTrain, GearboxBounds, GearboxKind, MotorSpec};

const MM3_TO_M3: f64 = 1e-9;

/// One row of the bearing catalog the regression is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BearingRow {
    pub bore_mm: f64,
    pub mass_kg: f64,
}

/// Proportions used to lay out the actuator around a gear train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActuatorGeometry {
    /// Face width at the reference planet count, in modules.
    pub face_width_factor: f64,
    /// Planet count at which the face width equals `face_width_factor · m`.
    /// Tooth load is shared between planets, so face width scales with
    /// `reference_planet_count / n_p`.
    pub reference_planet_count: f64,
    /// Ring rim thickness behind the pitch circle, in modules.
    pub ring_rim_factor: f64,
    /// Radial margin of the carrier plate beyond the planet centre circle (mm).
    pub carrier_margin_mm: f64,
    pub carrier_thickness_mm: f64,
    pub casing_wall_mm: f64,
    pub backplate_thickness_mm: f64,
    /// Axial clearance added to the gearbox stack (mm).
    pub axial_clearance_mm: f64,
    pub coupling_wall_mm: f64,
    pub coupling_length_mm: f64,
    /// Sun-shaft bearing bore as a fraction of the sun pitch diameter.
    pub sun_bore_fraction: f64,
    /// Output bearing bore as a fraction of the planet centre circle diameter.
    pub output_bore_fraction: f64,
}

impl Default for ActuatorGeometry {
    fn default() -> Self {
        ActuatorGeometry {
            face_width_factor: 10.0,
            reference_planet_count: 3.0,
            ring_rim_factor: 3.0,
            carrier_margin_mm: 6.0,
            carrier_thickness_mm: 3.0,
            casing_wall_mm: 1.5,
            backplate_thickness_mm: 2.0,
            axial_clearance_mm: 2.0,
            coupling_wall_mm: 2.0,
            coupling_length_mm: 6.0,
            sun_bore_fraction: 0.5,
            output_bore_fraction: 0.5,
        }
    }
}

/// Densities, bearing regression and actuator proportions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialTable {
    /// kg/m³
    pub aluminum_density: f64,
    /// kg/m³, gears
    pub steel_density: f64,
    /// kg/m³, printed link cores
    pub plastic_density: f64,
    /// Bearing mass = a · bore_mm^b (kg).
    pub bearing_a: f64,
    pub bearing_b: f64,
    /// Catalog rows (a, b) were fitted to.
    #[serde(default)]
    pub bearing_catalog: Vec<BearingRow>,
    #[serde(default)]
    pub geometry: ActuatorGeometry,
}

/// Thin-section deep-groove bearings, 618xx series.
pub fn default_bearing_catalog() -> Vec<BearingRow> {
    [
        (10.0, 0.0055),
        (12.0, 0.0063),
        (15.0, 0.0074),
        (17.0, 0.0078),
        (20.0, 0.018),
        (25.0, 0.022),
        (30.0, 0.027),
        (35.0, 0.030),
        (40.0, 0.032),
    ]
    .into_iter()
    .map(|(bore_mm, mass_kg)| BearingRow { bore_mm, mass_kg })
    .collect()
}

impl Default for MaterialTable {
    fn default() -> Self {
        MaterialTable {
            aluminum_density: 2700.0,
            steel_density: 7850.0,
            plastic_density: 1240.0,
            // log-log least squares over default_bearing_catalog()
            bearing_a: 1.710_679_562_838_388_8e-4,
            bearing_b: 1.457_819_119_192_876_4,
            bearing_catalog: default_bearing_catalog(),
            geometry: ActuatorGeometry::default(),
        }
    }
}

impl MaterialTable {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("materials.aluminum_density", self.aluminum_density),
            ("materials.steel_density", self.steel_density),
            ("materials.plastic_density", self.plastic_density),
            ("materials.bearing_a", self.bearing_a),
            ("materials.bearing_b", self.bearing_b),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        let g = &self.geometry;
        for (field, v) in [
            ("materials.geometry.face_width_factor", g.face_width_factor),
            ("materials.geometry.reference_planet_count", g.reference_planet_count),
            ("materials.geometry.sun_bore_fraction", g.sun_bore_fraction),
            ("materials.geometry.output_bore_fraction", g.output_bore_fraction),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        for (field, v) in [
            ("materials.geometry.ring_rim_factor", g.ring_rim_factor),
            ("materials.geometry.carrier_margin_mm", g.carrier_margin_mm),
            ("materials.geometry.carrier_thickness_mm", g.carrier_thickness_mm),
            ("materials.geometry.casing_wall_mm", g.casing_wall_mm),
            ("materials.geometry.backplate_thickness_mm", g.backplate_thickness_mm),
            ("materials.geometry.axial_clearance_mm", g.axial_clearance_mm),
            ("materials.geometry.coupling_wall_mm", g.coupling_wall_mm),
            ("materials.geometry.coupling_length_mm", g.coupling_length_mm),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Sandwich link: two aluminium plates around a printed core, plus chain and hardware.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkMassParams {
    pub plate_thickness_mm: f64,
    pub plate_width_mm: f64,
    pub core_thickness_mm: f64,
    /// kg/m
    pub chain_linear_density: f64,
    /// kg
    pub fixed_hardware_mass: f64,
}

impl Default for LinkMassParams {
    fn default() -> Self {
        LinkMassParams {
            plate_thickness_mm: 2.0,
            plate_width_mm: 25.0,
            core_thickness_mm: 8.0,
            chain_linear_density: 0.08,
            fixed_hardware_mass: 0.025,
        }
    }
}

impl LinkMassParams {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("link.plate_thickness_mm", self.plate_thickness_mm),
            ("link.plate_width_mm", self.plate_width_mm),
            ("link.core_thickness_mm", self.core_thickness_mm),
            ("link.chain_linear_density", self.chain_linear_density),
            ("link.fixed_hardware_mass", self.fixed_hardware_mass),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Every dimension (mm) of an actuator built around one gear train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorDimensions {
    pub sun_pitch_diameter_mm: f64,
    pub planet_pitch_diameter_mm: f64,
    pub ring_pitch_diameter_mm: f64,
    pub ring_outer_diameter_mm: f64,
    pub face_width_mm: f64,
    pub planet_center_diameter_mm: f64,
    pub carrier_outer_diameter_mm: f64,
    pub carrier_inner_diameter_mm: f64,
    pub carrier_thickness_mm: f64,
    pub casing_diameter_mm: f64,
    pub casing_length_mm: f64,
    pub casing_wall_mm: f64,
    pub backplate_diameter_mm: f64,
    pub backplate_thickness_mm: f64,
    pub coupling_outer_diameter_mm: f64,
    pub coupling_length_mm: f64,
    pub sun_bearing_bore_mm: f64,
    pub output_bearing_bore_mm: f64,
}

pub fn derive_dimensions(
    gt: &GearTrain,
    kind: GearboxKind,
    motor: &MotorSpec,
    geom: &ActuatorGeometry,
) -> ActuatorDimensions {
    let m = gt.module_mm;
    let d_sun = m * f64::from(gt.sun_teeth);
    let d_planet = m * f64::from(gt.planet_teeth);
    let d_ring = m * f64::from(gt.ring_teeth);
    let face = geom.face_width_factor * m * geom.reference_planet_count / f64::from(gt.planet_count);
    let d_centers = m * f64::from(gt.sun_teeth + gt.planet_teeth);
    let output_bore = geom.output_bore_fraction * d_centers;
    let sun_bore = geom.sun_bore_fraction * d_sun;
    let housing = motor.housing_diameter(kind);

    ActuatorDimensions {
        sun_pitch_diameter_mm: d_sun,
        planet_pitch_diameter_mm: d_planet,
        ring_pitch_diameter_mm: d_ring,
        ring_outer_diameter_mm: d_ring + 2.0 * geom.ring_rim_factor * m,
        face_width_mm: face,
        planet_center_diameter_mm: d_centers,
        carrier_outer_diameter_mm: d_centers + 2.0 * geom.carrier_margin_mm,
        carrier_inner_diameter_mm: output_bore,
        carrier_thickness_mm: geom.carrier_thickness_mm,
        casing_diameter_mm: housing,
        casing_length_mm: face + geom.carrier_thickness_mm + geom.axial_clearance_mm,
        casing_wall_mm: geom.casing_wall_mm,
        backplate_diameter_mm: housing,
        backplate_thickness_mm: geom.backplate_thickness_mm,
        coupling_outer_diameter_mm: sun_bore + 2.0 * geom.coupling_wall_mm,
        coupling_length_mm: geom.coupling_length_mm,
        sun_bearing_bore_mm: sun_bore,
        output_bearing_bore_mm: output_bore,
    }
}

/// Per-component masses (kg).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MassBreakdown {
    pub motor: f64,
    pub sun_gear: f64,
    pub planet_gears: f64,
    pub ring_gear: f64,
    pub carrier: f64,
    pub casing: f64,
    pub backplate: f64,
    pub coupling: f64,
    pub bearings: f64,
    pub total: f64,
}

impl MassBreakdown {
    pub fn components(&self) -> [(&'static str, f64); 9] {
        [
            ("motor", self.motor),
            ("sun_gear", self.sun_gear),
            ("planet_gears", self.planet_gears),
            ("ring_gear", self.ring_gear),
            ("carrier", self.carrier),
            ("casing", self.casing),
            ("backplate", self.backplate),
            ("coupling", self.coupling),
            ("bearings", self.bearings),
        ]
    }

    pub fn component_sum(&self) -> f64 {
        self.components().iter().map(|(_, v)| v).sum()
    }
}

fn disk_volume(diameter: f64, thickness: f64) -> f64 {
    PI / 4.0 * diameter * diameter * thickness
}

fn annulus_volume(outer: f64, inner: f64, thickness: f64) -> f64 {
    PI / 4.0 * (outer * outer - inner * inner).max(0.0) * thickness
}

/// Power-law bearing mass (kg) for a bore in mm.
pub fn bearing_mass(bore_mm: f64, materials: &MaterialTable) -> Result<f64> {
    if !(bore_mm.is_finite() && bore_mm > 0.0) {
        return Err(Error::invalid("bore_diameter", format!("must be > 0, got {bore_mm}")));
    }
    Ok(materials.bearing_a * bore_mm.powf(materials.bearing_b))
}

/// Mass breakdown for geometrically consistent trains. Only the train's own
/// geometry is checked here; the ratio window and housing bounds are the
/// caller's business.
pub fn actuator_mass(
    gt: &GearTrain,
    kind: GearboxKind,
    motor: &MotorSpec,
    materials: &MaterialTable,
) -> Result<MassBreakdown> {
    gt.check_fields()?;
    let geometry = gearbox::check_geometry(gt);
    if !geometry.passed {
        return Err(Error::InfeasibleTrain(format!(
            "{gt}: ring teeth off by {}",
            geometry.residual
        )));
    }
    let meshing = gearbox::check_meshing(gt);
    if !meshing.passed {
        return Err(Error::InfeasibleTrain(format!("{gt}: planets cannot mesh evenly")));
    }

    let d = derive_dimensions(gt, kind, motor, &materials.geometry);
    let steel = materials.steel_density * MM3_TO_M3;
    let al = materials.aluminum_density * MM3_TO_M3;

    let sun_gear = disk_volume(d.sun_pitch_diameter_mm, d.face_width_mm) * steel;
    let planet_gears = f64::from(gt.planet_count) * disk_volume(d.planet_pitch_diameter_mm, d.face_width_mm) * steel;
    let ring_gear = annulus_volume(d.ring_outer_diameter_mm, d.ring_pitch_diameter_mm, d.face_width_mm) * steel;
    let carrier = annulus_volume(
        d.carrier_outer_diameter_mm,
        d.carrier_inner_diameter_mm,
        d.carrier_thickness_mm,
    ) * al;
    let casing = PI * d.casing_diameter_mm * d.casing_wall_mm * d.casing_length_mm * al;
    let backplate = disk_volume(d.backplate_diameter_mm, d.backplate_thickness_mm) * al;
    let coupling = annulus_volume(
        d.coupling_outer_diameter_mm,
        d.sun_bearing_bore_mm,
        d.coupling_length_mm,
    ) * al;
    let bearings = bearing_mass(d.sun_bearing_bore_mm, materials)? + bearing_mass(d.output_bearing_bore_mm, materials)?;

    let mut b = MassBreakdown {
        motor: motor.mass,
        sun_gear,
        planet_gears,
        ring_gear,
        carrier,
        casing,
        backplate,
        coupling,
        bearings,
        total: 0.0,
    };
    b.total = b.component_sum();
    Ok(b)
}

pub const LINK_LENGTH_MIN: f64 = 0.05;
pub const LINK_LENGTH_MAX: f64 = 1.0;

/// Affine part of the link model: (kg per metre, fixed kg).
pub fn link_mass_coefficients(params: &LinkMassParams, materials: &MaterialTable) -> (f64, f64) {
    let w = params.plate_width_mm * 1e-3;
    let plates = 2.0 * w * params.plate_thickness_mm * 1e-3 * materials.aluminum_density;
    let core = w * params.core_thickness_mm * 1e-3 * materials.plastic_density;
    (plates + core + params.chain_linear_density, params.fixed_hardware_mass)
}

/// Link mass (kg) for a length in metres.
pub fn link_mass(length: f64, params: &LinkMassParams, materials: &MaterialTable) -> Result<f64> {
    if !(LINK_LENGTH_MIN..=LINK_LENGTH_MAX).contains(&length) {
        return Err(Error::LinkLengthOutOfRange {
            length,
            min: LINK_LENGTH_MIN,
            max: LINK_LENGTH_MAX,
        });
    }
    let (slope, intercept) = link_mass_coefficients(params, materials);
    Ok(slope * length + intercept)
}

/// A sized actuator: train, motor and the derived mass and torque.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorDesign {
    pub gear_train: GearTrain,
    pub kind: GearboxKind,
    pub motor: MotorSpec,
    /// kg
    pub mass: f64,
    /// N·m
    pub peak_torque: f64,
    pub ratio: f64,
}

/// Bundles mass and torque for a train that passes every bound check.
pub fn make_actuator(
    gt: &GearTrain,
    kind: GearboxKind,
    motor: &MotorSpec,
    bounds: &GearboxBounds,
    materials: &MaterialTable,
) -> Result<ActuatorDesign> {
    let report = gearbox::validate(gt, kind, motor, bounds, &bounds.ratio_window());
    if !report.feasible() {
        return Err(Error::InfeasibleTrain(format!(
            "{gt} as {kind}: fails {:?}",
            report.failed()
        )));
    }
    let mass = actuator_mass(gt, kind, motor, materials)?;
    let ratio = gearbox::gear_ratio(gt);
    Ok(ActuatorDesign {
        gear_train: *gt,
        kind,
        motor: motor.clone(),
        mass: mass.total,
        peak_torque: ratio * motor.peak_torque,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal() -> GearTrain {
        GearTrain::new(18, 36, 90, 0.5, 3).unwrap()
    }

    #[test]
    fn bearing_mass_rejects_bad_bore() {
        let mat = MaterialTable::default();
        assert!(bearing_mass(0.0, &mat).is_err());
        assert!(bearing_mass(-1.0, &mat).is_err());
        assert!(bearing_mass(1e-9, &mat).unwrap() < 1e-12);
        assert!(bearing_mass(10.0, &mat).unwrap() < bearing_mass(12.0, &mat).unwrap());
    }

    #[test]
    fn bearing_coefficients_refit_from_catalog() {
        let mat = MaterialTable::default();
        let pts: Vec<(f64, f64)> = mat
            .bearing_catalog
            .iter()
            .map(|r| (r.bore_mm.ln(), r.mass_kg.ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / n, sy / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let b = sxy / sxx;
        let a = (my - b * mx).exp();
        assert!((b - mat.bearing_b).abs() < 1e-9, "{b} vs {}", mat.bearing_b);
        assert!(((a - mat.bearing_a) / a).abs() < 1e-9, "{a} vs {}", mat.bearing_a);
    }

    #[test]
    fn isspg_lighter_than_esspg() {
        let motor = MotorSpec::default();
        let mat = MaterialTable::default();
        let i = actuator_mass(&nominal(), GearboxKind::Isspg, &motor, &mat).unwrap();
        let e = actuator_mass(&nominal(), GearboxKind::Esspg, &motor, &mat).unwrap();
        assert!(i.total < e.total);
        assert_eq!(i.sun_gear, e.sun_gear);
        assert_eq!(i.planet_gears, e.planet_gears);
        assert_eq!(i.ring_gear, e.ring_gear);
    }

    #[test]
    fn components_sum_to_total() {
        let motor = MotorSpec::default();
        let mat = MaterialTable::default();
        let gt = GearTrain::new(30, 30, 90, 0.5, 5).unwrap();
        let b = actuator_mass(&gt, GearboxKind::Isspg, &motor, &mat).unwrap();
        assert!(b.total > motor.mass);
        assert!((b.total - b.component_sum()).abs() < 1e-9);
        assert!(b.components().iter().all(|(_, v)| *v >= 0.0));
    }

    #[test]
    fn inconsistent_train_is_rejected() {
        let motor = MotorSpec::default();
        let mat = MaterialTable::default();
        let gt = GearTrain::new(18, 36, 91, 0.5, 3).unwrap();
        assert!(matches!(
            actuator_mass(&gt, GearboxKind::Isspg, &motor, &mat),
            Err(Error::InfeasibleTrain(_))
        ));
    }

    #[test]
    fn link_mass_is_affine() {
        let p = LinkMassParams::default();
        let mat = MaterialTable::default();
        let m = |l| link_mass(l, &p, &mat).unwrap();
        assert!(((m(0.4) - m(0.3)) - (m(0.5) - m(0.4))).abs() < 1e-12);
        let (slope, intercept) = link_mass_coefficients(&p, &mat);
        assert_eq!(intercept, p.fixed_hardware_mass);
        assert!((m(0.4) - (0.4 * slope + intercept)).abs() < 1e-15);
        assert!(link_mass(0.01, &p, &mat).is_err());
        assert!(link_mass(1.5, &p, &mat).is_err());
    }

    #[test]
    fn peak_torque_is_ratio_times_motor() {
        let motor = MotorSpec::default();
        let mat = MaterialTable::default();
        let b = GearboxBounds::default();
        let a = make_actuator(&nominal(), GearboxKind::Isspg, &motor, &b, &mat).unwrap();
        assert_eq!(a.peak_torque, 6.0 * motor.peak_torque);
        let hip = GearTrain::new(30, 30, 90, 0.5, 5).unwrap();
        let a = make_actuator(&hip, GearboxKind::Isspg, &motor, &b, &mat).unwrap();
        assert_eq!(a.peak_torque, 4.0 * motor.peak_torque);
        assert!(a.mass > motor.mass);
    }
}
