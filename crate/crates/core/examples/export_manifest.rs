//! Stage 3: build the design manifest for a point and print it as JSON.
//!
//!     cargo run --release --example export_manifest

use monoped_codesign::codesign::{decode, CodesignVariables};
use monoped_codesign::config::RunConfig;
use monoped_codesign::export::{build_manifest, keys_without_units, verify_manifest, Provenance};
use monoped_codesign::gearbox::GearboxKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::default();
    let catalog = config.build_catalog(&GearboxKind::ALL);
    let point = CodesignVariables::from_array([0.49, 0.36, 6.0, 4.0, 7.9, 2.2, 8.4]);
    let d = decode(&point, &config.problem(&catalog))?;

    let manifest = build_manifest(
        &d.model,
        &d.params,
        &d.hip,
        &d.knee,
        &config.link,
        &config.materials,
        Provenance::new(config.hash(), config.seed),
    )?;
    verify_manifest(&manifest, &config.link, &config.materials)?;

    let value = serde_json::to_value(&manifest)?;
    assert!(keys_without_units(&value).is_empty());
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}
