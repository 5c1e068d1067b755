//! Single-stage planetary gear trains and their feasibility constraints.
//!
//! A train is described by its tooth counts, module and planet count. The
//! constraints checked here are the ratio window, the sun/planet/ring
//! dimensional relation, equal-spacing meshing, adjacent-planet clearance and
//! the manufacturing bounds (module range, undercut limit, housing diameter,
//! planet count).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the planetary stage sits relative to the motor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GearboxKind {
    /// Internal: ring gear inside the stator bore.
    Isspg,
    /// External: stage mounted outside the motor body.
    Esspg,
}

impl GearboxKind {
    pub const ALL: [GearboxKind; 2] = [GearboxKind::Isspg, GearboxKind::Esspg];

    pub fn as_str(self) -> &'static str {
        match self {
            GearboxKind::Isspg => "ISSPG",
            GearboxKind::Esspg => "ESSPG",
        }
    }
}

impl fmt::Display for GearboxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tooth counts, module (mm) and planet count of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearTrain {
    pub sun_teeth: u32,
    pub planet_teeth: u32,
    pub ring_teeth: u32,
    pub module_mm: f64,
    pub planet_count: u32,
}

impl GearTrain {
    pub fn new(sun_teeth: u32, planet_teeth: u32, ring_teeth: u32, module_mm: f64, planet_count: u32) -> Result<Self> {
        let gt = GearTrain {
            sun_teeth,
            planet_teeth,
            ring_teeth,
            module_mm,
            planet_count,
        };
        gt.check_fields()?;
        Ok(gt)
    }

    /// Train whose ring tooth count is forced by the dimensional relation.
    pub fn from_sun_planet(sun_teeth: u32, planet_teeth: u32, module_mm: f64, planet_count: u32) -> Result<Self> {
        Self::new(
            sun_teeth,
            planet_teeth,
            sun_teeth + 2 * planet_teeth,
            module_mm,
            planet_count,
        )
    }

    pub fn check_fields(&self) -> Result<()> {
        if self.sun_teeth == 0 || self.planet_teeth == 0 || self.ring_teeth == 0 {
            return Err(Error::invalid("gear_train", "tooth counts must be positive"));
        }
        if self.planet_count == 0 {
            return Err(Error::invalid("gear_train.planet_count", "must be positive"));
        }
        if !(self.module_mm.is_finite() && self.module_mm > 0.0) {
            return Err(Error::invalid("gear_train.module_mm", "must be positive"));
        }
        Ok(())
    }

    /// Exact reduction ratio as (numerator, denominator) = (Ns + Nr, Ns).
    pub fn ratio_parts(&self) -> (u64, u64) {
        (
            u64::from(self.sun_teeth) + u64::from(self.ring_teeth),
            u64::from(self.sun_teeth),
        )
    }

    /// Sort key used for deterministic tie-breaking: teeth, then module, then planets.
    pub(crate) fn lexicographic_key(&self) -> (u32, u32, u32, u64, u32) {
        (
            self.sun_teeth,
            self.planet_teeth,
            self.ring_teeth,
            self.module_mm.to_bits(),
            self.planet_count,
        )
    }
}

impl fmt::Display for GearTrain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}, {}]",
            self.sun_teeth, self.planet_teeth, self.ring_teeth, self.module_mm, self.planet_count
        )
    }
}

/// Motor data needed to size the actuator around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotorSpec {
    pub name: String,
    /// kg
    pub mass: f64,
    /// mm
    pub outer_diameter: f64,
    /// mm
    pub stator_inner_diameter: f64,
    /// mm
    pub axial_length: f64,
    /// N·m
    pub peak_torque: f64,
    /// kg·m²
    #[serde(default)]
    pub rotor_inertia: f64,
}

impl Default for MotorSpec {
    /// Placeholder numbers for an 80 mm class outrunner; override from config.
    fn default() -> Self {
        MotorSpec {
            name: "8020-class BLDC".to_string(),
            mass: 0.650,
            outer_diameter: 88.0,
            stator_inner_diameter: 60.0,
            axial_length: 25.0,
            peak_torque: 2.5,
            rotor_inertia: 0.0,
        }
    }
}

impl MotorSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("motor.mass", self.mass),
            ("motor.outer_diameter", self.outer_diameter),
            ("motor.stator_inner_diameter", self.stator_inner_diameter),
            ("motor.axial_length", self.axial_length),
            ("motor.peak_torque", self.peak_torque),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        if self.stator_inner_diameter >= self.outer_diameter {
            return Err(Error::invalid(
                "motor.stator_inner_diameter",
                "must be smaller than outer_diameter",
            ));
        }
        if !(self.rotor_inertia.is_finite() && self.rotor_inertia >= 0.0) {
            return Err(Error::invalid("motor.rotor_inertia", "must be >= 0"));
        }
        Ok(())
    }

    /// Largest admissible ring pitch diameter (mm) for a gearbox kind.
    pub fn max_gearbox_diameter(&self, kind: GearboxKind, delta_clr: f64) -> f64 {
        match kind {
            GearboxKind::Esspg => self.outer_diameter - delta_clr,
            GearboxKind::Isspg => self.stator_inner_diameter - delta_clr,
        }
    }

    /// Diameter of the housing that surrounds the stage (mm).
    pub fn housing_diameter(&self, kind: GearboxKind) -> f64 {
        match kind {
            GearboxKind::Esspg => self.outer_diameter,
            GearboxKind::Isspg => self.stator_inner_diameter,
        }
    }
}

/// Search bounds for gear trains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GearboxBounds {
    pub gr_min: f64,
    pub gr_max: f64,
    /// mm
    pub m_min: f64,
    /// mm
    pub m_max: f64,
    #[serde(rename = "N_min")]
    pub n_min: u32,
    /// mm
    pub delta_p: f64,
    /// mm
    pub delta_clr: f64,
    pub n_p_min: u32,
    pub n_p_max: u32,
    /// Discrete module set (mm).
    #[serde(default = "default_modules")]
    pub modules: Vec<f64>,
}

fn default_modules() -> Vec<f64> {
    vec![0.5, 0.6, 0.8, 1.0, 1.2]
}

impl Default for GearboxBounds {
    fn default() -> Self {
        GearboxBounds {
            gr_min: 4.0,
            gr_max: 15.0,
            m_min: 0.5,
            m_max: 1.2,
            n_min: 18,
            delta_p: 5.0,
            delta_clr: 10.0,
            n_p_min: 2,
            n_p_max: 7,
            modules: default_modules(),
        }
    }
}

impl GearboxBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.gr_min < self.gr_max) {
            return Err(Error::invalid("bounds.gr_min", "must be < gr_max"));
        }
        if !(self.m_min > 0.0 && self.m_min <= self.m_max) {
            return Err(Error::invalid("bounds.m_min", "must satisfy 0 < m_min <= m_max"));
        }
        if self.n_min == 0 {
            return Err(Error::invalid("bounds.N_min", "must be positive"));
        }
        if !(self.delta_p >= 0.0 && self.delta_clr >= 0.0) {
            return Err(Error::invalid("bounds.delta_p", "clearances must be >= 0"));
        }
        if self.n_p_min < 1 || self.n_p_min > self.n_p_max {
            return Err(Error::invalid("bounds.n_p_min", "must satisfy 1 <= n_p_min <= n_p_max"));
        }
        if self.modules.is_empty() {
            return Err(Error::invalid("bounds.modules", "must not be empty"));
        }
        if self.modules.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::invalid("bounds.modules", "entries must be positive"));
        }
        Ok(())
    }

    /// The configured modules that also fall inside [m_min, m_max], ascending.
    pub fn admissible_modules(&self) -> Vec<f64> {
        let mut ms: Vec<f64> = self
            .modules
            .iter()
            .copied()
            .filter(|m| *m >= self.m_min && *m <= self.m_max)
            .collect();
        ms.sort_by(f64::total_cmp);
        ms.dedup();
        ms
    }

    /// Closed ratio window [gr_min, gr_max].
    pub fn ratio_window(&self) -> RatioBin {
        RatioBin::closed(self.gr_min, self.gr_max)
    }
}

/// Decimal number as an exact fraction. Bin edges such as 4.1 are not
/// representable in binary, so comparisons against them go through this.
pub(crate) fn decimal_fraction(x: f64) -> (i128, i128) {
    let mut den: i128 = 1;
    for _ in 0..=9 {
        let scaled = x * den as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() < 1e-9 * den as f64 {
            return (rounded as i128, den);
        }
        den *= 10;
    }
    // Not a short decimal: fall back to a 1e-9 grid.
    ((x * den as f64).round() as i128, den)
}

/// A ratio interval, half-open `[lo, hi)` unless `closed_hi` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioBin {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub closed_hi: bool,
}

impl RatioBin {
    pub fn half_open(lo: f64, hi: f64) -> Self {
        RatioBin {
            lo,
            hi,
            closed_hi: false,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        RatioBin {
            lo,
            hi,
            closed_hi: true,
        }
    }

    /// Exact membership test for the rational ratio `num / den`.
    pub fn contains_fraction(&self, num: u64, den: u64) -> bool {
        let (lo_n, lo_d) = decimal_fraction(self.lo);
        let (hi_n, hi_d) = decimal_fraction(self.hi);
        let (num, den) = (i128::from(num), i128::from(den));
        let above_lo = num * lo_d >= lo_n * den;
        let below_hi = if self.closed_hi {
            num * hi_d <= hi_n * den
        } else {
            num * hi_d < hi_n * den
        };
        above_lo && below_hi
    }

    pub fn contains_train(&self, gt: &GearTrain) -> bool {
        let (n, d) = gt.ratio_parts();
        self.contains_fraction(n, d)
    }

    /// Membership for a real-valued ratio (used by catalog lookups).
    pub fn contains_value(&self, ratio: f64) -> bool {
        ratio >= self.lo && (ratio < self.hi || (self.closed_hi && ratio <= self.hi))
    }
}

impl fmt::Display for RatioBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.closed_hi { ']' } else { ')' };
        write!(f, "[{}, {}{}", self.lo, self.hi, close)
    }
}

/// Outcome of one constraint with a signed residual (meaning depends on the check).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    fn new(passed: bool, residual: f64) -> Self {
        Check { passed, residual }
    }
}

/// Names of the individual constraints, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    GearRatio,
    Geometry,
    Meshing,
    Interference,
    ModuleRange,
    ModuleSet,
    MinTeeth,
    Diameter,
    PlanetCount,
}

/// The bound-type constraints, evaluated together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Residual: distance of the module outside [m_min, m_max] (0 inside).
    pub module_range: Check,
    /// Residual: distance to the nearest configured module.
    pub module_set: Check,
    /// Residual: smallest tooth count minus N_min.
    pub min_teeth: Check,
    /// Residual: D_GB_max minus ring pitch diameter (mm).
    pub diameter: Check,
    /// Residual: distance of n_p outside [n_p_min, n_p_max].
    pub planet_count: Check,
}

impl BoundsReport {
    pub fn all_passed(&self) -> bool {
        self.module_range.passed
            && self.module_set.passed
            && self.min_teeth.passed
            && self.diameter.passed
            && self.planet_count.passed
    }
}

/// Per-constraint results for one (train, kind, motor, bounds, bin) evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// Residual: distance of the ratio outside the bin (0 inside).
    pub gear_ratio: Check,
    /// Residual: Nr − Ns − 2·Np.
    pub geometry: Check,
    /// Residual: (Ns + Nr) mod n_p.
    pub meshing: Check,
    /// Residual: planet clearance minus delta_p (mm).
    pub interference: Check,
    pub bounds: BoundsReport,
}

impl ConstraintReport {
    pub fn feasible(&self) -> bool {
        self.gear_ratio.passed
            && self.geometry.passed
            && self.meshing.passed
            && self.interference.passed
            && self.bounds.all_passed()
    }

    pub fn failed(&self) -> Vec<Constraint> {
        let b = &self.bounds;
        [
            (Constraint::GearRatio, self.gear_ratio),
            (Constraint::Geometry, self.geometry),
            (Constraint::Meshing, self.meshing),
            (Constraint::Interference, self.interference),
            (Constraint::ModuleRange, b.module_range),
            (Constraint::ModuleSet, b.module_set),
            (Constraint::MinTeeth, b.min_teeth),
            (Constraint::Diameter, b.diameter),
            (Constraint::PlanetCount, b.planet_count),
        ]
        .into_iter()
        .filter(|(_, c)| !c.passed)
        .map(|(k, _)| k)
        .collect()
    }
}

pub fn gear_ratio(gt: &GearTrain) -> f64 {
    let (n, d) = gt.ratio_parts();
    n as f64 / d as f64
}

pub fn check_geometry(gt: &GearTrain) -> Check {
    let residual = i64::from(gt.ring_teeth) - i64::from(gt.sun_teeth) - 2 * i64::from(gt.planet_teeth);
    Check::new(residual == 0, residual as f64)
}

pub fn check_meshing(gt: &GearTrain) -> Check {
    let rem = (gt.sun_teeth + gt.ring_teeth) % gt.planet_count;
    Check::new(rem == 0, f64::from(rem))
}

/// Gap between adjacent planet pitch circles (mm).
pub fn planet_clearance(gt: &GearTrain) -> f64 {
    let m = gt.module_mm;
    let ns = f64::from(gt.sun_teeth);
    let np = f64::from(gt.planet_teeth);
    2.0 * m * (ns + np) * (PI / f64::from(gt.planet_count)).sin() - 2.0 * m * np
}

/// Passes when the clearance is at least `delta_p`; the residual is the clearance itself.
pub fn check_interference(gt: &GearTrain, delta_p: f64) -> Check {
    let clearance = planet_clearance(gt);
    Check::new(clearance >= delta_p, clearance)
}

fn outside(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

pub fn check_bounds(gt: &GearTrain, kind: GearboxKind, motor: &MotorSpec, bounds: &GearboxBounds) -> BoundsReport {
    let m = gt.module_mm;

    let range_gap = outside(m, bounds.m_min, bounds.m_max);
    let set_gap = bounds
        .modules
        .iter()
        .map(|s| (s - m).abs())
        .fold(f64::INFINITY, f64::min);

    let smallest = gt.sun_teeth.min(gt.planet_teeth).min(gt.ring_teeth);
    let teeth_res = i64::from(smallest) - i64::from(bounds.n_min);

    let d_max = motor.max_gearbox_diameter(kind, bounds.delta_clr);
    let diameter_res = d_max - m * f64::from(gt.ring_teeth);

    let np_gap = outside(
        f64::from(gt.planet_count),
        f64::from(bounds.n_p_min),
        f64::from(bounds.n_p_max),
    );

    BoundsReport {
        module_range: Check::new(range_gap == 0.0, range_gap),
        module_set: Check::new(set_gap <= 1e-12, set_gap),
        min_teeth: Check::new(teeth_res >= 0, teeth_res as f64),
        diameter: Check::new(diameter_res >= 0.0, diameter_res),
        planet_count: Check::new(np_gap == 0.0, np_gap),
    }
}

pub fn validate(
    gt: &GearTrain,
    kind: GearboxKind,
    motor: &MotorSpec,
    bounds: &GearboxBounds,
    bin: &RatioBin,
) -> ConstraintReport {
    let ratio = gear_ratio(gt);
    let in_bin = bin.contains_train(gt);
    let ratio_gap = if in_bin {
        0.0
    } else {
        outside(ratio, bin.lo, bin.hi).max(f64::MIN_POSITIVE)
    };
    ConstraintReport {
        gear_ratio: Check::new(in_bin, ratio_gap),
        geometry: check_geometry(gt),
        meshing: check_meshing(gt),
        interference: check_interference(gt, bounds.delta_p),
        bounds: check_bounds(gt, kind, motor, bounds),
    }
}
