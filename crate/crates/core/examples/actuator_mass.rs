//! Component mass breakdown of one gear train in both housings.
//!
//!     cargo run --release --example actuator_mass

use monoped_codesign::gearbox::{self, GearTrain, GearboxBounds, GearboxKind, MotorSpec};
use monoped_codesign::mass_models::{actuator_mass, link_mass, LinkMassParams, MaterialTable};

fn main() -> monoped_codesign::Result<()> {
    let motor = MotorSpec::default();
    let bounds = GearboxBounds::default();
    let materials = MaterialTable::default();
    let train = GearTrain::new(18, 36, 90, 0.5, 3)?;

    for kind in GearboxKind::ALL {
        let report = gearbox::validate(&train, kind, &motor, &bounds, &bounds.ratio_window());
        println!(
            "{train} as {kind}: ratio {:.3}, failed {:?}",
            gearbox::gear_ratio(&train),
            report.failed()
        );
        let mass = actuator_mass(&train, kind, &motor, &materials)?;
        for (name, kg) in mass.components() {
            println!("  {name:<13} {kg:.4} kg");
        }
        println!("  {:<13} {:.4} kg", "total", mass.total);
    }

    let link = LinkMassParams::default();
    for l in [0.3, 0.4, 0.5] {
        println!("link {l:.1} m -> {:.4} kg", link_mass(l, &link, &materials)?);
    }
    Ok(())
}
