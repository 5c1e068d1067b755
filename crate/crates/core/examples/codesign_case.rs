//! Stage 2: optimize one case over a few seeds and compare with the nominal design.
//!
//!     cargo run --release --example codesign_case -- c 3
//!
//! Arguments are the case (a, b or c) and the number of seeds.

use monoped_codesign::codesign::{evaluate, optimize_case, CaseKind, CaseSpec, CodesignVariables};
use monoped_codesign::config::RunConfig;
use monoped_codesign::gearbox::GearboxKind;

fn main() -> monoped_codesign::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = match args.next().as_deref() {
        Some("a") => CaseKind::A,
        Some("b") => CaseKind::B,
        _ => CaseKind::C,
    };
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let config = RunConfig::default();
    let catalog = config.build_catalog(&GearboxKind::ALL);
    let problem = config.problem(&catalog);

    let nominal = evaluate(&CodesignVariables::nominal(), &problem);
    println!(
        "nominal: h = {:.4} m, E = {:.3} J, cost {:.4}",
        nominal.apex_height, nominal.energy, nominal.cost
    );

    let case = CaseSpec::preset(kind);
    for seed in 0..seeds {
        let r = optimize_case(&case, &problem, &config.optimizer, seed)?;
        let y = r.best;
        println!(
            "case {} seed {seed}: h = {:.4} m, E = {:.3} J, cost {:.4} | l1 {:.3} l2 {:.3} g_k {:.2} g_h {:.2} K {:.1} C {:.2} T {:.2}",
            kind.as_str(),
            r.evaluation.apex_height,
            r.evaluation.energy,
            r.evaluation.cost,
            y.l1,
            y.l2,
            y.g_k,
            y.g_h,
            y.k,
            y.c,
            y.t
        );
    }
    Ok(())
}
