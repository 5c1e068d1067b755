//! Joint search over link lengths, gear ratios and controller gains.
//!
//! A point `Y = [l1, l2, g_k, g_h, K, C, T]` is decoded into a robot (link
//! masses from the link model, actuators from the stage-1 catalog) and a
//! controller, scored by one simulated jump, and optimized with CMA-ES in
//! box-normalized coordinates. Cases freeze subsets of the coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmaes::{self, CmaesConfig};
use crate::dynamics::{self, ControllerParams, JointActuator, JumpResult, RobotModel, SimConfig, Termination};
use crate::error::{Error, Result};
use crate::mass_models::{self, ActuatorDesign, LinkMassParams, MaterialTable};
use crate::stage1::{self, ActuatorCatalog};

pub const DIM: usize = 7;
pub const VARIABLE_NAMES: [&str; DIM] = ["l1", "l2", "g_k", "g_h", "K", "C", "T"];

/// The design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodesignVariables {
    /// Thigh length (m).
    pub l1: f64,
    /// Shank length (m).
    pub l2: f64,
    pub g_k: f64,
    pub g_h: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

impl CodesignVariables {
    pub fn nominal() -> Self {
        CodesignVariables::from_array([0.4, 0.4, 6.0, 6.0, 50.0, 2.5, 10.0])
    }

    pub fn to_array(&self) -> [f64; DIM] {
        [self.l1, self.l2, self.g_k, self.g_h, self.k, self.c, self.t]
    }

    pub fn from_array(a: [f64; DIM]) -> Self {
        CodesignVariables {
            l1: a[0],
            l2: a[1],
            g_k: a[2],
            g_h: a[3],
            k: a[4],
            c: a[5],
            t: a[6],
        }
    }
}

/// Box bounds on the design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodesignBounds {
    pub l_min: f64,
    pub l_max: f64,
    pub g_min: f64,
    pub g_max: f64,
    #[serde(rename = "K_min")]
    pub k_min: f64,
    #[serde(rename = "K_max")]
    pub k_max: f64,
    #[serde(rename = "C_min")]
    pub c_min: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    #[serde(rename = "T_min")]
    pub t_min: f64,
    #[serde(rename = "T_max")]
    pub t_max: f64,
}

impl Default for CodesignBounds {
    fn default() -> Self {
        CodesignBounds {
            l_min: 0.3,
            l_max: 0.5,
            g_min: 4.0,
            g_max: 8.7,
            k_min: 5.0,
            k_max: 200.0,
            c_min: 0.0,
            c_max: 10.0,
            t_min: 0.0,
            t_max: 50.0,
        }
    }
}

impl CodesignBounds {
    pub fn lower(&self) -> [f64; DIM] {
        [
            self.l_min, self.l_min, self.g_min, self.g_min, self.k_min, self.c_min, self.t_min,
        ]
    }

    pub fn upper(&self) -> [f64; DIM] {
        [
            self.l_max, self.l_max, self.g_max, self.g_max, self.k_max, self.c_max, self.t_max,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("l", self.l_min, self.l_max),
            ("g", self.g_min, self.g_max),
            ("K", self.k_min, self.k_max),
            ("C", self.c_min, self.c_max),
            ("T", self.t_min, self.t_max),
        ];
        for (name, lo, hi) in pairs {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(
                    format!("codesign_bounds.{name}"),
                    format!("need finite min < max, got [{lo}, {hi}]"),
                ));
            }
        }
        if self.l_min < mass_models::LINK_LENGTH_MIN || self.l_max > mass_models::LINK_LENGTH_MAX {
            return Err(Error::invalid("codesign_bounds.l", "outside the link mass model range"));
        }
        if self.k_min < 0.0 || self.c_min < 0.0 || self.t_min < 0.0 {
            return Err(Error::invalid("codesign_bounds", "gains must be non-negative"));
        }
        Ok(())
    }

    /// Names the first coordinate outside the box.
    pub fn check(&self, y: &CodesignVariables) -> Result<()> {
        let (lo, hi) = (self.lower(), self.upper());
        for (i, v) in y.to_array().iter().enumerate() {
            if !(v.is_finite() && *v >= lo[i] && *v <= hi[i]) {
                return Err(Error::invalid(
                    VARIABLE_NAMES[i],
                    format!("{v} outside [{}, {}]", lo[i], hi[i]),
                ));
            }
        }
        Ok(())
    }

    pub fn to_unit(&self, y: &[f64; DIM]) -> [f64; DIM] {
        let (lo, hi) = (self.lower(), self.upper());
        std::array::from_fn(|i| (y[i] - lo[i]) / (hi[i] - lo[i]))
    }

    pub fn from_unit(&self, u: &[f64; DIM]) -> [f64; DIM] {
        let (lo, hi) = (self.lower(), self.upper());
        std::array::from_fn(|i| (lo[i] + u[i] * (hi[i] - lo[i])).clamp(lo[i], hi[i]))
    }
}

/// Weights of the scalar cost `λ1·K_h·e^(−h) + λ2·E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    /// J
    #[serde(rename = "K_h")]
    pub k_h: f64,
    pub infeasible_penalty: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            lambda1: 1.0,
            lambda2: 1.0,
            k_h: 30.0,
            infeasible_penalty: 300.0,
        }
    }
}

impl CostConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) || !(self.lambda1.is_finite() && self.lambda2.is_finite()) {
            return Err(Error::invalid("cost.lambda", "weights must be finite and >= 0"));
        }
        if self.lambda1 == 0.0 && self.lambda2 == 0.0 {
            return Err(Error::invalid("cost.lambda", "weights cannot both be zero"));
        }
        if !(self.k_h.is_finite() && self.k_h > 0.0) {
            return Err(Error::invalid("cost.K_h", "must be > 0"));
        }
        if !self.infeasible_penalty.is_finite() {
            return Err(Error::invalid("cost.infeasible_penalty", "must be finite"));
        }
        Ok(())
    }

    pub fn combine(&self, apex_height: f64, energy: f64) -> f64 {
        self.lambda1 * self.k_h * (-apex_height).exp() + self.lambda2 * energy
    }
}

/// Robot data that is not part of the design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotSettings {
    /// Body structure without actuators or links (kg).
    pub base_mass: f64,
    /// Spring rest length as a fraction of l1 + l2.
    pub l0_factor: f64,
    pub alpha0: f64,
    pub gravity: f64,
    pub reflect_rotor_inertia: bool,
}

impl Default for RobotSettings {
    fn default() -> Self {
        RobotSettings {
            base_mass: 1.0,
            l0_factor: 0.9,
            alpha0: 0.0,
            gravity: dynamics::GRAVITY,
            reflect_rotor_inertia: true,
        }
    }
}

impl RobotSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_mass.is_finite() && self.base_mass > 0.0) {
            return Err(Error::invalid("robot.base_mass", "must be > 0"));
        }
        if !(self.l0_factor.is_finite() && self.l0_factor > 0.0) {
            return Err(Error::invalid("robot.l0_factor", "must be > 0"));
        }
        if !self.alpha0.is_finite() {
            return Err(Error::invalid("robot.alpha0", "must be finite"));
        }
        if !(self.gravity.is_finite() && self.gravity > 0.0) {
            return Err(Error::invalid("robot.gravity", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Nominal,
    A,
    B,
    C,
    Custom,
}

impl CaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseKind::Nominal => "nominal",
            CaseKind::A => "a",
            CaseKind::B => "b",
            CaseKind::C => "c",
            CaseKind::Custom => "custom",
        }
    }
}

/// Which coordinates are optimized; the rest keep their value from `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub kind: CaseKind,
    /// Order l1, l2, g_k, g_h, K, C, T.
    pub free: [bool; DIM],
    pub values: CodesignVariables,
}

impl CaseSpec {
    pub fn preset(kind: CaseKind) -> Self {
        let free = match kind {
            CaseKind::Nominal | CaseKind::Custom => [false; DIM],
            CaseKind::A => [false, false, true, true, true, true, true],
            CaseKind::B => [true, true, false, false, true, true, true],
            CaseKind::C => [true; DIM],
        };
        CaseSpec {
            kind,
            free,
            values: CodesignVariables::nominal(),
        }
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..DIM).filter(|&i| self.free[i]).collect()
    }

    pub fn validate(&self, bounds: &CodesignBounds) -> Result<()> {
        bounds.check(&self.values)
    }

    /// Full point from values of the free coordinates (in `free_indices` order).
    pub fn assemble(&self, free_values: &[f64]) -> [f64; DIM] {
        let mut y = self.values.to_array();
        for (&i, v) in self.free_indices().iter().zip(free_values) {
            y[i] = *v;
        }
        y
    }
}

/// Everything needed to score a design point.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub catalog: &'a ActuatorCatalog,
    pub materials: &'a MaterialTable,
    pub link: &'a LinkMassParams,
    pub robot: &'a RobotSettings,
    pub sim: &'a SimConfig,
    pub cost: &'a CostConfig,
    pub bounds: &'a CodesignBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    pub model: RobotModel,
    pub params: ControllerParams,
    pub hip: ActuatorDesign,
    pub knee: ActuatorDesign,
}

/// Builds the robot and controller for `y`. Fails when a ratio has no catalog entry.
pub fn decode(y: &CodesignVariables, problem: &Problem) -> Result<Decoded> {
    problem.bounds.check(y)?;
    let hip = stage1::lookup(problem.catalog, y.g_h)?.clone();
    let knee = stage1::lookup(problem.catalog, y.g_k)?.clone();
    let thigh_mass = mass_models::link_mass(y.l1, problem.link, problem.materials)?;
    let shank_mass = mass_models::link_mass(y.l2, problem.link, problem.materials)?;
    let model = RobotModel {
        l1: y.l1,
        l2: y.l2,
        thigh_mass,
        shank_mass,
        hip: JointActuator::from(&hip),
        knee: JointActuator::from(&knee),
        base_mass: problem.robot.base_mass,
        gravity: problem.robot.gravity,
        reflect_rotor_inertia: problem.robot.reflect_rotor_inertia,
    };
    let params = ControllerParams {
        k: y.k,
        c: y.c,
        t: y.t,
        l0: problem.robot.l0_factor * (y.l1 + y.l2),
        alpha0: problem.robot.alpha0,
    };
    Ok(Decoded {
        model,
        params,
        hip,
        knee,
    })
}

/// Score of one design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub cost: f64,
    pub feasible: bool,
    /// m
    pub apex_height: f64,
    /// J
    pub energy: f64,
    pub termination: Option<Termination>,
    /// Why the point was penalized.
    pub reason: Option<String>,
}

/// Decodes, simulates and scores `y`. Points that cannot be built, never
/// leave the ground or fail numerically get the infeasible penalty.
pub fn evaluate_with(y: &CodesignVariables, problem: &Problem, sim: &SimConfig) -> (Evaluation, Option<JumpResult>) {
    let penalized = |reason: String, h: f64, e: f64, term| Evaluation {
        cost: problem.cost.infeasible_penalty,
        feasible: false,
        apex_height: h,
        energy: e,
        termination: term,
        reason: Some(reason),
    };
    let decoded = match decode(y, problem) {
        Ok(d) => d,
        Err(e) => return (penalized(e.to_string(), sim.h0, 0.0, None), None),
    };
    let jump = match dynamics::rollout(&decoded.model, &decoded.params, sim) {
        Ok(j) => j,
        Err(e) => return (penalized(e.to_string(), sim.h0, 0.0, None), None),
    };
    let eval = match jump.termination {
        Termination::NoLiftoff | Termination::NumericalFailure => penalized(
            jump.termination.as_str().to_string(),
            jump.apex_height,
            jump.energy,
            Some(jump.termination),
        ),
        t => Evaluation {
            cost: problem.cost.combine(jump.apex_height, jump.energy),
            feasible: true,
            apex_height: jump.apex_height,
            energy: jump.energy,
            termination: Some(t),
            reason: None,
        },
    };
    (eval, Some(jump))
}

/// Scores `y` without keeping the trajectory.
pub fn evaluate(y: &CodesignVariables, problem: &Problem) -> Evaluation {
    let sim = SimConfig {
        record_trace: false,
        ..problem.sim.clone()
    };
    evaluate_with(y, problem, &sim).0
}

pub fn cost(y: &CodesignVariables, problem: &Problem) -> f64 {
    evaluate(y, problem).cost
}

/// CMA-ES budget for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    pub population: usize,
    pub max_generations: usize,
    /// Initial step in box-normalized units.
    pub sigma0: f64,
    pub resample_limit: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            population: 16,
            max_generations: 200,
            sigma0: 0.3,
            resample_limit: 10,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("optimizer.population", "must be >= 2"));
        }
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return Err(Error::invalid("optimizer.sigma0", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub generation: usize,
    pub best_cost: f64,
    pub median_cost: f64,
    pub sigma: f64,
    /// Apex height of the best-so-far point (m).
    pub best_h: f64,
    /// Energy of the best-so-far point (J).
    #[serde(rename = "best_E")]
    pub best_e: f64,
}

pub fn write_history_csv(rows: &[HistoryRow], mut w: impl std::io::Write) -> std::io::Result<()> {
    writeln!(w, "gen,best_cost,median_cost,sigma,best_h,best_E")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.generation, r.best_cost, r.median_cost, r.sigma, r.best_h, r.best_e
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: CaseSpec,
    pub seed: u64,
    pub best: CodesignVariables,
    pub evaluation: Evaluation,
    pub history: Vec<HistoryRow>,
    pub evaluations: usize,
    /// Largest cost among feasible evaluated points.
    pub max_feasible_cost: f64,
    #[serde(skip)]
    pub jump: Option<JumpResult>,
}

/// Optimizes the free coordinates of `case`. With nothing free the frozen
/// point is scored once.
pub fn optimize_case(
    case: &CaseSpec,
    problem: &Problem,
    settings: &OptimizerSettings,
    seed: u64,
) -> Result<CaseResult> {
    problem.bounds.validate()?;
    problem.cost.validate()?;
    problem.sim.validate()?;
    settings.validate()?;
    case.validate(problem.bounds)?;

    let free = case.free_indices();
    let fast_sim = SimConfig {
        record_trace: false,
        ..problem.sim.clone()
    };
    let mut best: Option<(CodesignVariables, Evaluation)> = None;
    let mut max_feasible = f64::NEG_INFINITY;
    let mut history = Vec::new();
    let mut evaluations = 0;
    fn record(
        best: &mut Option<(CodesignVariables, Evaluation)>,
        max_feasible: &mut f64,
        y: CodesignVariables,
        e: Evaluation,
    ) {
        if e.feasible {
            *max_feasible = max_feasible.max(e.cost);
        }
        // Strict improvement only, so ties keep the earliest point.
        if best.as_ref().is_none_or(|(_, b)| e.cost < b.cost) {
            *best = Some((y, e));
        }
    }

    if free.is_empty() {
        let e = evaluate_with(&case.values, problem, &fast_sim).0;
        record(&mut best, &mut max_feasible, case.values, e);
        evaluations = 1;
    } else {
        let config = CmaesConfig {
            dimension: free.len(),
            population: Some(settings.population),
            sigma0: settings.sigma0,
            max_generations: settings.max_generations,
            target_cost: None,
            seed,
            bounds: vec![[0.0, 1.0]; free.len()],
            resample_limit: settings.resample_limit,
        };
        let frozen_unit = problem.bounds.to_unit(&case.values.to_array());
        let to_point = |u: &[f64]| {
            let mut unit = frozen_unit;
            for (&i, v) in free.iter().zip(u) {
                unit[i] = *v;
            }
            let mut y = problem.bounds.from_unit(&unit);
            // Frozen coordinates keep their exact values.
            for i in (0..DIM).filter(|i| !case.free[*i]) {
                y[i] = case.values.to_array()[i];
            }
            CodesignVariables::from_array(y)
        };
        let x0 = vec![0.5; free.len()];
        let mut generation = 0;
        let minimum = cmaes::minimize_batch(
            |points| {
                let scored: Vec<(CodesignVariables, Evaluation)> = points
                    .par_iter()
                    .map(|u| {
                        let y = to_point(u);
                        (y, evaluate_with(&y, problem, &fast_sim).0)
                    })
                    .collect();
                let costs: Vec<f64> = scored.iter().map(|(_, e)| e.cost).collect();
                evaluations += scored.len();
                for (y, e) in scored {
                    record(&mut best, &mut max_feasible, y, e);
                }
                let (_, b) = best.as_ref().expect("population is non-empty");
                history.push(HistoryRow {
                    generation,
                    best_cost: b.cost,
                    median_cost: cmaes::median(&costs),
                    sigma: f64::NAN,
                    best_h: b.apex_height,
                    best_e: b.energy,
                });
                generation += 1;
                Ok(costs)
            },
            &x0,
            &config,
        )?;
        for (row, rec) in history.iter_mut().zip(&minimum.history) {
            row.sigma = rec.sigma;
        }
    }

    let (best, best_eval) = best.expect("at least one evaluation");
    let (evaluation, jump) = evaluate_with(&best, problem, problem.sim);
    debug_assert_eq!(evaluation.cost, best_eval.cost);
    Ok(CaseResult {
        case: case.clone(),
        seed,
        best,
        evaluation,
        history,
        evaluations,
        max_feasible_cost: max_feasible,
        jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gearbox::{GearTrain, GearboxBounds, GearboxKind, MotorSpec};
    use crate::stage1::{build_catalog, RatioGrid};
    use std::sync::OnceLock;

    fn catalog() -> &'static ActuatorCatalog {
        static CAT: OnceLock<ActuatorCatalog> = OnceLock::new();
        CAT.get_or_init(|| {
            build_catalog(
                &MotorSpec::default(),
                &GearboxBounds::default(),
                &MaterialTable::default(),
                &RatioGrid::default(),
                &GearboxKind::ALL,
            )
        })
    }

    struct Owned {
        materials: MaterialTable,
        link: LinkMassParams,
        robot: RobotSettings,
        sim: SimConfig,
        cost: CostConfig,
        bounds: CodesignBounds,
    }

    impl Owned {
        fn new() -> Self {
            Owned {
                materials: MaterialTable::default(),
                link: LinkMassParams::default(),
                robot: RobotSettings::default(),
                sim: SimConfig::default(),
                cost: CostConfig::default(),
                bounds: CodesignBounds::default(),
            }
        }

        fn problem(&self) -> Problem<'_> {
            Problem {
                catalog: catalog(),
                materials: &self.materials,
                link: &self.link,
                robot: &self.robot,
                sim: &self.sim,
                cost: &self.cost,
                bounds: &self.bounds,
            }
        }
    }

    #[test]
    fn nominal_decodes_to_six_to_one_isspg() {
        let o = Owned::new();
        let d = decode(&CodesignVariables::nominal(), &o.problem()).unwrap();
        let nominal = GearTrain::new(18, 36, 90, 0.5, 3).unwrap();
        assert_eq!(d.hip.gear_train, nominal);
        assert_eq!(d.knee.gear_train, nominal);
        assert_eq!(d.hip.kind, GearboxKind::Isspg);
        assert!((d.params.l0 - 0.72).abs() < 1e-12);
        let m = &d.model;
        let expect = o.robot.base_mass + 2.0 * d.hip.mass + m.thigh_mass + m.shank_mass;
        assert!((m.total_mass() - expect).abs() < 1e-12);
    }

    #[test]
    fn decode_rejects_out_of_box() {
        let o = Owned::new();
        let mut y = CodesignVariables::nominal();
        y.l2 = 0.55;
        let err = decode(&y, &o.problem()).unwrap_err();
        assert!(err.to_string().contains("l2"), "{err}");
    }

    #[test]
    fn cost_arithmetic() {
        let c = CostConfig::default();
        let expect = 30.0 * (-0.8f64).exp() + 12.5;
        assert!((c.combine(0.8, 12.5) - expect).abs() < 1e-12);
    }

    #[test]
    fn energy_only_weighting() {
        let mut o = Owned::new();
        o.cost.lambda1 = 0.0;
        let p = o.problem();
        let y = CodesignVariables::nominal();
        let e = evaluate(&y, &p);
        let d = decode(&y, &p).unwrap();
        let jump = dynamics::rollout(&d.model, &d.params, &o.sim).unwrap();
        assert_eq!(e.cost, jump.energy);
    }

    #[test]
    fn evaluation_is_repeatable() {
        let o = Owned::new();
        let p = o.problem();
        let y = CodesignVariables::from_array([0.45, 0.35, 5.0, 4.3, 30.0, 1.0, 5.0]);
        assert_eq!(evaluate(&y, &p), evaluate(&y, &p));
    }

    #[test]
    fn frozen_case_scores_once() {
        let o = Owned::new();
        let p = o.problem();
        let case = CaseSpec::preset(CaseKind::Nominal);
        let r = optimize_case(&case, &p, &OptimizerSettings::default(), 1).unwrap();
        assert_eq!(r.evaluations, 1);
        assert!(r.history.is_empty());
        assert_eq!(r.best, CodesignVariables::nominal());
        assert_eq!(r.evaluation.cost, cost(&CodesignVariables::nominal(), &p));
    }

    #[test]
    fn unit_mapping_round_trips() {
        let b = CodesignBounds::default();
        let y = CodesignVariables::nominal().to_array();
        let back = b.from_unit(&b.to_unit(&y));
        for i in 0..DIM {
            assert!((back[i] - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn case_masks() {
        assert_eq!(CaseSpec::preset(CaseKind::A).free_indices(), vec![2, 3, 4, 5, 6]);
        assert_eq!(CaseSpec::preset(CaseKind::B).free_indices(), vec![0, 1, 4, 5, 6]);
        assert_eq!(CaseSpec::preset(CaseKind::C).free_indices().len(), 7);
    }
}
