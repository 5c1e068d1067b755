//! Stage 1: enumerate planetary trains for the default motor and print the
//! lightest actuator per ratio bin.
//!
//!     cargo run --release --example build_catalog

use monoped_codesign::config::RunConfig;
use monoped_codesign::gearbox::GearboxKind;
use monoped_codesign::stage1::lookup;

fn main() {
    let config = RunConfig::default();
    let catalog = config.build_catalog(&GearboxKind::ALL);

    println!(
        "{:>11}  {:5}  {:>8}  {:>8}  train [Ns, Np, Nr, m, n_p]",
        "bin", "kind", "mass kg", "peak Nm"
    );
    for bin in &catalog.bins {
        let Some(best) = &bin.best else { continue };
        println!(
            "[{:4.1},{:4.1})  {:5}  {:8.4}  {:8.2}  {}",
            bin.ratio_lo,
            bin.ratio_hi,
            best.kind.as_str(),
            best.mass,
            best.peak_torque,
            best.gear_train
        );
    }

    for kind in GearboxKind::ALL {
        if let Some(cutoff) = catalog.feasibility_cutoff(kind) {
            println!("{kind} feasible up to ratio {cutoff:.1}");
        }
    }

    // Ratios between bins resolve to the bin that contains them.
    for ratio in [4.0, 6.05, 9.0] {
        match lookup(&catalog, ratio) {
            Ok(d) => println!("lookup({ratio}) -> {} {} ({:.4} kg)", d.kind, d.gear_train, d.mass),
            Err(e) => println!("lookup({ratio}) -> {e}"),
        }
    }
}
