//! Ratio-binned brute-force search for the lightest actuator.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gearbox::{self, GearTrain, GearboxBounds, GearboxKind, MotorSpec, RatioBin};
use crate::mass_models::{self, ActuatorDesign, MaterialTable};

/// Evenly spaced ratio bins `[lo, lo+step), ..., [hi-step, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatioGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for RatioGrid {
    fn default() -> Self {
        RatioGrid {
            lo: 4.0,
            hi: 15.0,
            step: 0.1,
        }
    }
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

impl RatioGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) {
            return Err(Error::invalid("grid.lo", "must be < grid.hi"));
        }
        if !(self.step > 0.0) {
            return Err(Error::invalid("grid.step", "must be > 0"));
        }
        let n = (self.hi - self.lo) / self.step;
        if (n - n.round()).abs() > 1e-9 {
            return Err(Error::invalid("grid.step", "(hi - lo) / step must be integral"));
        }
        Ok(())
    }

    pub fn bin_count(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize
    }

    pub fn bin(&self, index: usize) -> RatioBin {
        let n = self.bin_count();
        let lo = round9(self.lo + index as f64 * self.step);
        let hi = round9(self.lo + (index + 1) as f64 * self.step);
        if index + 1 == n {
            RatioBin::closed(lo, hi)
        } else {
            RatioBin::half_open(lo, hi)
        }
    }

    pub fn bins(&self) -> Vec<RatioBin> {
        (0..self.bin_count()).map(|i| self.bin(i)).collect()
    }
}

/// Deterministic preference: lighter, then lower ratio, then ISSPG, then teeth.
pub fn compare_designs(a: &ActuatorDesign, b: &ActuatorDesign) -> Ordering {
    a.mass
        .total_cmp(&b.mass)
        .then_with(|| {
            let (an, ad) = a.gear_train.ratio_parts();
            let (bn, bd) = b.gear_train.ratio_parts();
            (u128::from(an) * u128::from(bd)).cmp(&(u128::from(bn) * u128::from(ad)))
        })
        .then_with(|| a.kind.cmp(&b.kind))
        .then_with(|| a.gear_train.lexicographic_key().cmp(&b.gear_train.lexicographic_key()))
}

/// All trains of one kind that satisfy every constraint for `bin`.
///
/// Ring teeth are forced by the dimensional relation. The sun and planet
/// loops are capped by the housing diameter at the smallest module, and the
/// planet range is narrowed to the ratios the bin can hold; everything
/// skipped that way fails the diameter or ratio constraint.
pub fn enumerate_feasible(
    kind: GearboxKind,
    motor: &MotorSpec,
    bounds: &GearboxBounds,
    materials: &MaterialTable,
    bin: &RatioBin,
) -> Vec<ActuatorDesign> {
    let d_max = motor.max_gearbox_diameter(kind, bounds.delta_clr);
    let mut out = Vec::new();
    for module in bounds.admissible_modules() {
        if d_max < 0.0 {
            break;
        }
        let ring_cap = (d_max / module + 1e-9).floor() as u32;
        let n_min = bounds.n_min;
        if ring_cap < 3 * n_min {
            continue;
        }
        let sun_cap = ring_cap - 2 * n_min;
        for ns in n_min..=sun_cap {
            let planet_cap = (ring_cap - ns) / 2;
            // ratio = 2 + 2·Np/Ns  →  Np ∈ [(lo−2)·Ns/2, (hi−2)·Ns/2]
            let lo = ((bin.lo - 2.0) * f64::from(ns) / 2.0).floor().max(0.0) as u32;
            let hi = ((bin.hi - 2.0) * f64::from(ns) / 2.0).ceil().max(0.0) as u32;
            let np_lo = lo.max(n_min);
            let np_hi = hi.min(planet_cap);
            for np in np_lo..=np_hi {
                for planets in bounds.n_p_min..=bounds.n_p_max {
                    let Ok(gt) = GearTrain::from_sun_planet(ns, np, module, planets) else {
                        continue;
                    };
                    if !gearbox::validate(&gt, kind, motor, bounds, bin).feasible() {
                        continue;
                    }
                    if let Ok(design) = mass_models::make_actuator(&gt, kind, motor, bounds, materials) {
                        out.push(design);
                    }
                }
            }
        }
    }
    out
}

/// One ratio bin of the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogBin {
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub closed_hi: bool,
    pub best: Option<ActuatorDesign>,
    pub best_isspg: Option<ActuatorDesign>,
    pub best_esspg: Option<ActuatorDesign>,
}

impl CatalogBin {
    pub fn ratio_bin(&self) -> RatioBin {
        RatioBin {
            lo: self.ratio_lo,
            hi: self.ratio_hi,
            closed_hi: self.closed_hi,
        }
    }
}

/// Lightest actuator per ratio bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorCatalog {
    pub grid: RatioGrid,
    pub kinds: Vec<GearboxKind>,
    pub bins: Vec<CatalogBin>,
}

fn lightest(designs: impl IntoIterator<Item = ActuatorDesign>) -> Option<ActuatorDesign> {
    designs.into_iter().min_by(compare_designs)
}

/// Builds the catalog over `kinds`; bins are evaluated in parallel and merged by index.
pub fn build_catalog(
    motor: &MotorSpec,
    bounds: &GearboxBounds,
    materials: &MaterialTable,
    grid: &RatioGrid,
    kinds: &[GearboxKind],
) -> ActuatorCatalog {
    let bins: Vec<CatalogBin> = grid
        .bins()
        .par_iter()
        .map(|bin| {
            let per_kind = |kind: GearboxKind| {
                if kinds.contains(&kind) {
                    lightest(enumerate_feasible(kind, motor, bounds, materials, bin))
                } else {
                    None
                }
            };
            let best_isspg = per_kind(GearboxKind::Isspg);
            let best_esspg = per_kind(GearboxKind::Esspg);
            let best = lightest(best_isspg.iter().chain(best_esspg.iter()).cloned());
            CatalogBin {
                ratio_lo: bin.lo,
                ratio_hi: bin.hi,
                closed_hi: bin.closed_hi,
                best,
                best_isspg,
                best_esspg,
            }
        })
        .collect();
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    ActuatorCatalog {
        grid: grid.clone(),
        kinds,
        bins,
    }
}

impl ActuatorCatalog {
    pub fn bin_index(&self, ratio: f64) -> Option<usize> {
        self.bins.iter().position(|b| b.ratio_bin().contains_value(ratio))
    }

    /// Largest bin upper edge with a feasible design of `kind`, if any.
    pub fn feasibility_cutoff(&self, kind: GearboxKind) -> Option<f64> {
        self.bins
            .iter()
            .rev()
            .find(|b| match kind {
                GearboxKind::Isspg => b.best_isspg.is_some(),
                GearboxKind::Esspg => b.best_esspg.is_some(),
            })
            .map(|b| b.ratio_hi)
    }

    pub fn write_json(&self, w: impl Write) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    /// Plot table: one row per non-empty bin.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "ratio_lo,ratio_hi,kind,mass_kg,peak_torque_Nm,Ns,Np,Nr,module_mm,n_p"
        )?;
        for bin in &self.bins {
            if let Some(d) = &bin.best {
                let gt = &d.gear_train;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    bin.ratio_lo,
                    bin.ratio_hi,
                    d.kind,
                    d.mass,
                    d.peak_torque,
                    gt.sun_teeth,
                    gt.planet_teeth,
                    gt.ring_teeth,
                    gt.module_mm,
                    gt.planet_count
                )?;
            }
        }
        Ok(())
    }
}

/// Lightest actuator in the bin containing `ratio`.
pub fn lookup(catalog: &ActuatorCatalog, ratio: f64) -> Result<&ActuatorDesign> {
    catalog
        .bin_index(ratio)
        .and_then(|i| catalog.bins[i].best.as_ref())
        .ok_or(Error::NoFeasibleActuator { ratio })
}
