use monoped_codesign::codesign::{decode, CodesignBounds, CodesignVariables, CostConfig, Problem, RobotSettings};
use monoped_codesign::dynamics::SimConfig;
use monoped_codesign::export::{
    build_manifest, keys_without_units, read_manifest, verify_manifest, write_manifest, DesignManifest, Provenance,
};
use monoped_codesign::gearbox::{GearboxBounds, GearboxKind, MotorSpec};
use monoped_codesign::mass_models::{actuator_mass, link_mass, LinkMassParams, MaterialTable};
use monoped_codesign::stage1::{build_catalog, RatioGrid};
use monoped_codesign::Error;

fn case_c_manifest() -> DesignManifest {
    let catalog = build_catalog(
        &MotorSpec::default(),
        &GearboxBounds::default(),
        &MaterialTable::default(),
        &RatioGrid::default(),
        &GearboxKind::ALL,
    );
    let (materials, link, robot, sim, cost, bounds) = (
        MaterialTable::default(),
        LinkMassParams::default(),
        RobotSettings::default(),
        SimConfig::default(),
        CostConfig::default(),
        CodesignBounds::default(),
    );
    let p = Problem {
        catalog: &catalog,
        materials: &materials,
        link: &link,
        robot: &robot,
        sim: &sim,
        cost: &cost,
        bounds: &bounds,
    };
    let y = CodesignVariables::from_array([0.49, 0.36, 6.0, 4.0, 7.9, 2.2, 8.4]);
    let d = decode(&y, &p).unwrap();
    build_manifest(
        &d.model,
        &d.params,
        &d.hip,
        &d.knee,
        &link,
        &materials,
        Provenance::new("abc", 7),
    )
    .unwrap()
}

#[test]
fn knee_pitch_diameters_follow_teeth_and_module() {
    let m = case_c_manifest();
    let knee = &m.actuators.knee;
    assert_eq!((knee.sun_teeth, knee.planet_teeth, knee.ring_teeth), (18, 36, 90));
    assert_eq!(knee.dimensions.sun_pitch_diameter_mm, 9.0);
    assert_eq!(knee.dimensions.planet_pitch_diameter_mm, 18.0);
    assert_eq!(knee.dimensions.ring_pitch_diameter_mm, 45.0);
    assert_eq!(knee.gear_ratio, 6.0);
    assert_eq!(m.actuators.hip.kind, GearboxKind::Isspg);
    for a in [&m.actuators.hip, &m.actuators.knee] {
        let d = &a.dimensions;
        assert_eq!(d.sun_pitch_diameter_mm, a.module_mm * f64::from(a.sun_teeth));
        assert_eq!(d.ring_pitch_diameter_mm, a.module_mm * f64::from(a.ring_teeth));
    }
}

#[test]
fn manifest_masses_match_recomputation() {
    let m = case_c_manifest();
    let materials = MaterialTable::default();
    for a in [&m.actuators.hip, &m.actuators.knee] {
        let gt = monoped_codesign::gearbox::GearTrain::new(
            a.sun_teeth,
            a.planet_teeth,
            a.ring_teeth,
            a.module_mm,
            a.planet_count,
        )
        .unwrap();
        let b = actuator_mass(&gt, a.kind, &a.motor.to_spec(), &materials).unwrap();
        assert!((a.masses.total_kg - b.total).abs() < 1e-12);
        assert!((a.masses.ring_gear_kg - b.ring_gear).abs() < 1e-12);
    }
    let thigh = link_mass(0.49, &LinkMassParams::default(), &materials).unwrap();
    assert!((m.links.thigh_mass_kg - thigh).abs() < 1e-12);
    verify_manifest(&m, &LinkMassParams::default(), &materials).unwrap();
}

#[test]
fn round_trip_is_identical_and_byte_stable() {
    let m = case_c_manifest();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    write_manifest(&m, &path).unwrap();
    let back = read_manifest(&path).unwrap();
    assert_eq!(back, m);
    let first = std::fs::read(&path).unwrap();
    write_manifest(&case_c_manifest(), &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn every_numeric_key_has_a_unit_suffix() {
    let value = serde_json::to_value(case_c_manifest()).unwrap();
    assert_eq!(keys_without_units(&value), Vec::<String>::new());
    let bare = serde_json::json!({"a": {"width": 3.0, "width_mm": 3.0}});
    assert_eq!(keys_without_units(&bare), vec!["a.width".to_string()]);
}

#[test]
fn tampered_mass_is_reported_by_field() {
    let mut m = case_c_manifest();
    m.actuators.knee.masses.casing_kg += 0.01;
    m.links.thigh_mass_kg *= 2.0;
    let err = verify_manifest(&m, &LinkMassParams::default(), &MaterialTable::default()).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Inconsistent(_)));
    assert!(msg.contains("actuators.knee.masses.casing_kg"), "{msg}");
    assert!(msg.contains("links.thigh_mass_kg"), "{msg}");
}

#[test]
fn schema_violation_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut value = serde_json::to_value(case_c_manifest()).unwrap();
    value["actuators"]["hip"]["sun_teeth"] = serde_json::json!("eighteen");
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let err = read_manifest(&path).unwrap_err();
    assert!(err.to_string().contains("actuators.hip.sun_teeth"), "{err}");

    value["actuators"]["hip"]["sun_teeth"] = serde_json::json!(18);
    value["body"]["colour"] = serde_json::json!("red");
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let err = read_manifest(&path).unwrap_err();
    assert!(err.to_string().contains("colour"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let err = read_manifest(std::path::Path::new("/nonexistent/manifest.json")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(!err.is_config_error());
}

#[test]
fn inconsistent_inputs_are_listed() {
    let catalog = build_catalog(
        &MotorSpec::default(),
        &GearboxBounds::default(),
        &MaterialTable::default(),
        &RatioGrid::default(),
        &GearboxKind::ALL,
    );
    let materials = MaterialTable::default();
    let link = LinkMassParams::default();
    let (robot, sim, cost, bounds) = (
        RobotSettings::default(),
        SimConfig::default(),
        CostConfig::default(),
        CodesignBounds::default(),
    );
    let p = Problem {
        catalog: &catalog,
        materials: &materials,
        link: &link,
        robot: &robot,
        sim: &sim,
        cost: &cost,
        bounds: &bounds,
    };
    let d = decode(&CodesignVariables::nominal(), &p).unwrap();
    let mut model = d.model.clone();
    model.knee.mass += 0.1;
    model.shank_mass = 0.0;
    let err = build_manifest(
        &model,
        &d.params,
        &d.hip,
        &d.knee,
        &link,
        &materials,
        Provenance::new("x", 0),
    )
    .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("model.knee.mass"), "{msg}");
    assert!(msg.contains("model.shank_mass"), "{msg}");
    assert!(!msg.contains("model.hip.mass"), "{msg}");
}

/// Structural check of `value` against the subset of JSON Schema used in docs/.
fn conforms(
    schema: &serde_json::Value,
    root: &serde_json::Value,
    value: &serde_json::Value,
    path: &str,
) -> Vec<String> {
    use serde_json::Value;
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return conforms(&root["$defs"][name], root, value, path);
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        return if options.contains(value) {
            vec![]
        } else {
            vec![format!("{path}: {value} not allowed")]
        };
    }
    let ok = match schema["type"].as_str().unwrap() {
        "object" => {
            let Some(obj) = value.as_object() else {
                return vec![format!("{path}: not an object")];
            };
            let props = schema["properties"].as_object().unwrap();
            let mut errors: Vec<String> = obj
                .keys()
                .filter(|k| !props.contains_key(*k))
                .map(|k| format!("{path}.{k}: not in schema"))
                .collect();
            for (k, sub) in props {
                match obj.get(k) {
                    Some(v) => errors.extend(conforms(sub, root, v, &format!("{path}.{k}"))),
                    None => errors.push(format!("{path}.{k}: missing")),
                }
            }
            return errors;
        }
        "number" => value.is_f64() || value.is_u64(),
        "integer" => value.is_u64(),
        "string" => value.is_string(),
        other => panic!("unhandled schema type {other}"),
    };
    if ok {
        vec![]
    } else {
        vec![format!("{path}: {value} has the wrong type")]
    }
}

#[test]
fn shipped_schema_matches_manifest() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/manifest.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let value = serde_json::to_value(case_c_manifest()).unwrap();
    assert_eq!(conforms(&schema, &schema, &value, ""), Vec::<String>::new());

    let mut extra = value.clone();
    extra["links"]["colour"] = serde_json::json!("red");
    extra["actuators"]["knee"]["kind"] = serde_json::json!("HELICAL");
    let errors = conforms(&schema, &schema, &extra, "");
    assert_eq!(errors.len(), 2, "{errors:?}");
}
