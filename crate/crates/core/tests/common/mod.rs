//! Reference implementations shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::f64::consts::PI;

use monoped_codesign::gearbox::{Constraint, GearTrain, GearboxBounds, GearboxKind, MotorSpec, RatioBin};
use monoped_codesign::mass_models::{ActuatorDesign, MaterialTable};
use monoped_codesign::stage1::{build_catalog, ActuatorCatalog, RatioGrid};

/// A motor small enough that every feasible train has Ns, Np <= 40.
pub fn small_motor() -> MotorSpec {
    MotorSpec {
        outer_diameter: 48.0,
        stator_inner_diameter: 46.0,
        ..MotorSpec::default()
    }
}

pub type Key = (u32, u32, u32, u64, u32, GearboxKind);

pub fn key(d: &ActuatorDesign) -> Key {
    let g = &d.gear_train;
    (
        g.sun_teeth,
        g.planet_teeth,
        g.ring_teeth,
        g.module_mm.to_bits(),
        g.planet_count,
        d.kind,
    )
}

/// Triple loop over (Ns, Np, module, planets) with the constraints written out.
pub fn reference_trains(
    motor: &MotorSpec,
    bounds: &GearboxBounds,
    kind: GearboxKind,
    teeth_max: u32,
) -> Vec<GearTrain> {
    let housing = match kind {
        GearboxKind::Isspg => motor.stator_inner_diameter,
        GearboxKind::Esspg => motor.outer_diameter,
    };
    let mut out = Vec::new();
    for ns in 1..=teeth_max {
        for np in 1..=teeth_max {
            let nr = ns + 2 * np;
            for &m in &bounds.modules {
                for n in 1..=10u32 {
                    let ok = ns.min(np).min(nr) >= bounds.n_min
                        && (ns + nr) % n == 0
                        && 2.0 * m * f64::from(ns + np) * (PI / f64::from(n)).sin() - 2.0 * m * f64::from(np)
                            >= bounds.delta_p
                        && m * f64::from(nr) <= housing - bounds.delta_clr
                        && m >= bounds.m_min
                        && m <= bounds.m_max
                        && n >= bounds.n_p_min
                        && n <= bounds.n_p_max;
                    if ok {
                        out.push(GearTrain::new(ns, np, nr, m, n).unwrap());
                    }
                }
            }
        }
    }
    out
}

/// Bin index by exact integer arithmetic on tenths: ratio in [lo + i/10, lo + (i+1)/10).
pub fn reference_bin(gt: &GearTrain, grid_lo_tenths: u64, bins: usize) -> Option<usize> {
    let num = u64::from(gt.sun_teeth + gt.ring_teeth) * 10;
    let den = u64::from(gt.sun_teeth);
    if num < grid_lo_tenths * den {
        return None;
    }
    let i = ((num - grid_lo_tenths * den) / den) as usize;
    if i < bins {
        Some(i)
    } else if i == bins && num == (grid_lo_tenths + bins as u64) * den {
        Some(bins - 1)
    } else {
        None
    }
}

pub fn reference_order(a: &ActuatorDesign, b: &ActuatorDesign) -> Ordering {
    if a.mass != b.mass {
        return a.mass.partial_cmp(&b.mass).unwrap();
    }
    let (ga, gb) = (&a.gear_train, &b.gear_train);
    let ra = u64::from(ga.sun_teeth + ga.ring_teeth) * u64::from(gb.sun_teeth);
    let rb = u64::from(gb.sun_teeth + gb.ring_teeth) * u64::from(ga.sun_teeth);
    if ra != rb {
        return ra.cmp(&rb);
    }
    let ka = a.kind == GearboxKind::Esspg;
    let kb = b.kind == GearboxKind::Esspg;
    if ka != kb {
        return ka.cmp(&kb);
    }
    (ga.sun_teeth, ga.planet_teeth, ga.ring_teeth)
        .cmp(&(gb.sun_teeth, gb.planet_teeth, gb.ring_teeth))
        .then(ga.module_mm.partial_cmp(&gb.module_mm).unwrap())
        .then(ga.planet_count.cmp(&gb.planet_count))
}

pub fn default_catalog() -> ActuatorCatalog {
    build_catalog(
        &MotorSpec::default(),
        &GearboxBounds::default(),
        &MaterialTable::default(),
        &RatioGrid::default(),
        &GearboxKind::ALL,
    )
}

pub fn train(ns: u32, np: u32, nr: u32, m: f64, n: u32) -> GearTrain {
    GearTrain::new(ns, np, nr, m, n).unwrap()
}

/// Reference gearsets with their exact ratio as (numerator, denominator).
pub fn known_gearsets() -> Vec<(GearTrain, GearboxKind, (u64, u64))> {
    vec![
        (train(18, 36, 90, 0.5, 3), GearboxKind::Isspg, (6, 1)),
        (train(30, 30, 90, 0.5, 5), GearboxKind::Isspg, (4, 1)),
        (train(22, 65, 152, 0.5, 3), GearboxKind::Esspg, (174, 22)),
    ]
}

pub struct Perturbation {
    pub train: GearTrain,
    pub kind: GearboxKind,
    pub bin: RatioBin,
    /// Exactly these constraints fail, in report order.
    pub fails: Vec<Constraint>,
    pub note: &'static str,
}

pub fn perturbed_gearsets() -> Vec<Perturbation> {
    let window = GearboxBounds::default().ratio_window();
    let p = |train, kind, bin, fails: &[Constraint], note| Perturbation {
        train,
        kind,
        bin,
        fails: fails.to_vec(),
        note,
    };
    use Constraint::*;
    use GearboxKind::*;
    vec![
        p(
            train(18, 36, 93, 0.5, 3),
            Esspg,
            window,
            &[Geometry],
            "ring one tooth off",
        ),
        p(
            train(30, 31, 92, 0.5, 4),
            Isspg,
            window,
            &[Meshing],
            "odd Ns + Np with four planets",
        ),
        p(
            train(30, 30, 90, 0.5, 6),
            Isspg,
            window,
            &[Interference],
            "six planets touch",
        ),
        p(
            train(22, 65, 152, 0.5, 3),
            Isspg,
            window,
            &[Diameter],
            "knee set inside the stator",
        ),
        p(
            train(18, 36, 90, 0.7, 3),
            Esspg,
            window,
            &[ModuleSet],
            "module not in the set",
        ),
        p(
            train(18, 36, 90, 0.4, 3),
            Isspg,
            window,
            &[ModuleRange, ModuleSet],
            "module below range",
        ),
        p(train(16, 37, 90, 0.5, 2), Isspg, window, &[MinTeeth], "sun too small"),
        p(
            train(30, 30, 90, 0.5, 8),
            Isspg,
            window,
            &[Interference, PlanetCount],
            "eight planets",
        ),
        p(
            train(18, 36, 90, 0.5, 3),
            Isspg,
            RatioBin::half_open(4.0, 4.1),
            &[GearRatio],
            "ratio outside bin",
        ),
    ]
}
