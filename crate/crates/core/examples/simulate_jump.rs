//! Decode a design point and simulate one vertical jump.
//!
//!     cargo run --release --example simulate_jump -- 0.4,0.4,6,6,50,2.5,10
//!
//! The point is l1, l2, g_k, g_h, K, C, T. The trajectory goes to stdout
//! with `--csv`.

use monoped_codesign::cli::parse_point;
use monoped_codesign::codesign::{decode, CodesignVariables};
use monoped_codesign::config::RunConfig;
use monoped_codesign::dynamics::rollout;
use monoped_codesign::gearbox::GearboxKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let point = match args.iter().find(|a| !a.starts_with("--")) {
        Some(p) => parse_point(p)?,
        None => CodesignVariables::nominal(),
    };

    let config = RunConfig::default();
    let catalog = config.build_catalog(&GearboxKind::ALL);
    let d = decode(&point, &config.problem(&catalog))?;
    let jump = rollout(&d.model, &d.params, &config.sim)?;

    if args.iter().any(|a| a == "--csv") {
        jump.write_trace_csv(std::io::stdout().lock())?;
        return Ok(());
    }

    println!("hip  {} {} {:.4} kg", d.hip.kind, d.hip.gear_train, d.hip.mass);
    println!("knee {} {} {:.4} kg", d.knee.kind, d.knee.gear_train, d.knee.mass);
    println!("total mass {:.3} kg", d.model.total_mass());
    match &jump.liftoff {
        Some(lo) => println!(
            "liftoff at t = {:.3} s, z = {:.4} m, vz = {:.3} m/s ({:?})",
            lo.time, lo.height, lo.velocity[1], lo.cause
        ),
        None => println!("no liftoff"),
    }
    println!(
        "apex {:.4} m, energy {:.3} J, {}",
        jump.apex_height,
        jump.energy,
        jump.termination.as_str()
    );
    Ok(())
}
