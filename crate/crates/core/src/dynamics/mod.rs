//! Planar single-jump simulator for the monoped.
//!
//! The body is a non-rotating point cluster at the hip. During stance the
//! foot is pinned and the leg is a 2R chain driven by the virtual-leg
//! controller; liftoff happens when the ground would have to pull on the
//! foot, or when the knee reaches full extension with the body still rising.
//! Flight is ballistic with the joints frozen and no torque.

pub mod controller;
pub mod kinematics;
pub mod plant;

use std::io::Write;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub use controller::{joint_torques, vmc_wrench, ControllerParams, LegState, Wrench};
pub use kinematics::{inverse_kinematics, leg_geometry, LegGeometry};

use crate::error::{Error, Result};
use crate::mass_models::ActuatorDesign;

pub const GRAVITY: f64 = 9.81;

/// Mass and torque data of one joint actuator as seen by the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointActuator {
    /// kg
    pub mass: f64,
    /// N·m
    pub peak_torque: f64,
    pub ratio: f64,
    /// Motor rotor inertia, kg·m²
    pub rotor_inertia: f64,
}

impl From<&ActuatorDesign> for JointActuator {
    fn from(a: &ActuatorDesign) -> Self {
        JointActuator {
            mass: a.mass,
            peak_torque: a.peak_torque,
            ratio: a.ratio,
            rotor_inertia: a.motor.rotor_inertia,
        }
    }
}

/// The simulated robot. Both actuators sit at the hip with the body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    /// Thigh length (m).
    pub l1: f64,
    /// Shank length (m).
    pub l2: f64,
    pub thigh_mass: f64,
    pub shank_mass: f64,
    pub hip: JointActuator,
    pub knee: JointActuator,
    /// Structural body mass excluding actuators and links (kg).
    pub base_mass: f64,
    pub gravity: f64,
    /// Add ratio²·rotor inertia to the joint inertias.
    pub reflect_rotor_inertia: bool,
}

impl RobotModel {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("l1", self.l1),
            ("l2", self.l2),
            ("base_mass", self.base_mass),
            ("gravity", self.gravity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        // An infinite limit disables the clamp.
        for (field, v) in [
            ("hip.peak_torque", self.hip.peak_torque),
            ("knee.peak_torque", self.knee.peak_torque),
        ] {
            if !(v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        for (field, v) in [
            ("thigh_mass", self.thigh_mass),
            ("shank_mass", self.shank_mass),
            ("hip.mass", self.hip.mass),
            ("knee.mass", self.knee.mass),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Body plus both actuators, lumped at the hip.
    pub fn hip_cluster_mass(&self) -> f64 {
        self.base_mass + self.hip.mass + self.knee.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.hip_cluster_mass() + self.thigh_mass + self.shank_mass
    }

    pub fn torque_limits(&self) -> [f64; 2] {
        [self.hip.peak_torque, self.knee.peak_torque]
    }

    pub fn reflected_inertia(&self) -> [f64; 2] {
        if self.reflect_rotor_inertia {
            [
                self.hip.ratio * self.hip.ratio * self.hip.rotor_inertia,
                self.knee.ratio * self.knee.ratio * self.knee.rotor_inertia,
            ]
        } else {
            [0.0, 0.0]
        }
    }
}

/// Integration and episode settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// s
    pub dt: f64,
    /// Initial hip height (m); the foot starts directly below.
    pub h0: f64,
    /// s
    pub max_sim_time: f64,
    /// End the episode once the body starts descending after liftoff.
    #[serde(default = "yes")]
    pub stop_at_apex: bool,
    /// Treat full knee extension with a rising body as liftoff.
    #[serde(default = "yes")]
    pub liftoff_at_full_extension: bool,
    /// Keep the per-step trace in the result.
    #[serde(default = "yes")]
    pub record_trace: bool,
}

fn yes() -> bool {
    true
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.002,
            h0: 0.5,
            max_sim_time: 2.0,
            stop_at_apex: true,
            liftoff_at_full_extension: true,
            record_trace: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("sim.dt", self.dt),
            ("sim.h0", self.h0),
            ("sim.max_sim_time", self.max_sim_time),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Stance,
    Flight,
    Landed,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Stance => "stance",
            Phase::Flight => "flight",
            Phase::Landed => "landed",
        }
    }
}

/// Full simulator state. In stance the hip position follows from the
/// joint angles and the foot anchor; in flight the joints are frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub phase: Phase,
    pub time: f64,
    /// Hip position (x, z), m.
    pub base: Vector2<f64>,
    pub base_velocity: Vector2<f64>,
    /// Hip and knee angles (rad).
    pub q: Vector2<f64>,
    pub qd: Vector2<f64>,
    /// Foot contact point while in stance.
    pub foot_anchor: Vector2<f64>,
}

impl SimState {
    /// At rest, foot on the ground directly below a hip at height `h0`.
    pub fn initial(model: &RobotModel, config: &SimConfig, x0: f64) -> Result<Self> {
        let (t1, t2) = inverse_kinematics(config.h0, 0.0, model.l1, model.l2)?;
        Ok(SimState {
            phase: Phase::Stance,
            time: 0.0,
            base: Vector2::new(x0, config.h0),
            base_velocity: Vector2::zeros(),
            q: Vector2::new(t1, t2),
            qd: Vector2::zeros(),
            foot_anchor: Vector2::new(x0, 0.0),
        })
    }

    pub fn leg(&self, model: &RobotModel) -> LegGeometry {
        leg_geometry(self.q[0], self.q[1], model.l1, model.l2)
    }

    /// Leg length/deflection and rates as the controller sees them.
    pub fn leg_state(&self, model: &RobotModel) -> (LegGeometry, LegState) {
        let geo = self.leg(model);
        let foot_vel = geo.jacobian * self.qd;
        let (l_dot, alpha_dot) = kinematics::polar_rates(&geo.foot, &foot_vel);
        let leg = LegState {
            l: geo.length,
            l_dot,
            alpha: geo.alpha,
            alpha_dot,
        };
        (geo, leg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepFailure {
    /// Knee reached 0 or π.
    Singular,
    NonFinite,
}

/// One semi-implicit Euler step of the pinned-foot chain under joint torques `tau`.
pub fn stance_step(
    state: &SimState,
    tau: [f64; 2],
    model: &RobotModel,
    config: &SimConfig,
) -> std::result::Result<SimState, StepFailure> {
    debug_assert_eq!(state.phase, Phase::Stance);
    let tau = Vector2::new(tau[0], tau[1]);
    let qdd = plant::joint_accelerations(model, &state.q, &state.qd, &tau).ok_or(StepFailure::NonFinite)?;
    let qd = state.qd + config.dt * qdd;
    let q = state.q + config.dt * qd;
    if !(q.iter().chain(qd.iter()).all(|v| v.is_finite())) {
        return Err(StepFailure::NonFinite);
    }
    let geo = leg_geometry(q[0], q[1], model.l1, model.l2);
    let next = SimState {
        phase: Phase::Stance,
        time: state.time + config.dt,
        base: state.foot_anchor - geo.foot,
        base_velocity: plant::hip_velocity(model, &q, &qd),
        q,
        qd,
        foot_anchor: state.foot_anchor,
    };
    if geo.singular {
        return Err(StepFailure::Singular);
    }
    Ok(next)
}

/// Exact ballistic step of the hip with joints frozen.
pub fn flight_step(state: &SimState, model: &RobotModel, config: &SimConfig) -> SimState {
    let dt = config.dt;
    let g = model.gravity;
    let v = state.base_velocity;
    SimState {
        phase: Phase::Flight,
        time: state.time + dt,
        base: Vector2::new(state.base.x + v.x * dt, state.base.y + v.y * dt - 0.5 * g * dt * dt),
        base_velocity: Vector2::new(v.x, v.y - g * dt),
        q: state.q,
        qd: Vector2::zeros(),
        foot_anchor: state.foot_anchor,
    }
}

/// Positive mechanical work of both joints (J); regenerative power is ignored.
pub fn jump_energy(tau: &[[f64; 2]], omega: &[[f64; 2]], dt: f64) -> f64 {
    assert_eq!(tau.len(), omega.len(), "torque and velocity traces differ in length");
    tau.iter()
        .zip(omega)
        .map(|(t, w)| (t[0] * w[0]).max(0.0) * dt + (t[1] * w[1]).max(0.0) * dt)
        .sum()
}

/// One row of the recorded trajectory. Torques and forces are the ones that
/// drove the step ending at `t` (zero on the first row and in flight).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub base_x: f64,
    pub base_z: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub omega_h: f64,
    pub omega_k: f64,
    pub tau_h: f64,
    pub tau_k: f64,
    pub l: f64,
    pub alpha: f64,
    pub fx: f64,
    pub fz: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftoffCause {
    ContactForce,
    FullExtension,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Liftoff {
    pub time: f64,
    pub height: f64,
    /// Hip velocity right after the joints freeze (m/s).
    pub velocity: [f64; 2],
    pub cause: LiftoffCause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Apex,
    Landed,
    NoLiftoff,
    NumericalFailure,
    TimeLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Apex => "apex",
            Termination::Landed => "landed",
            Termination::NoLiftoff => "no liftoff",
            Termination::NumericalFailure => "numerical failure",
            Termination::TimeLimit => "time limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpResult {
    /// Highest hip height above ground (m).
    pub apex_height: f64,
    /// Positive joint work during stance (J).
    pub energy: f64,
    pub liftoff: Option<Liftoff>,
    pub termination: Termination,
    pub trace: Vec<TraceSample>,
}

impl JumpResult {
    pub fn lifted_off(&self) -> bool {
        self.liftoff.is_some()
    }

    /// Trajectory CSV with 13 fixed columns.
    pub fn write_trace_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "t,base_z,theta1,theta2,omega_h,omega_k,tau_h,tau_k,l,alpha,F_x,F_z,phase"
        )?;
        for s in &self.trace {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.base_z,
                s.theta1,
                s.theta2,
                s.omega_h,
                s.omega_k,
                s.tau_h,
                s.tau_k,
                s.l,
                s.alpha,
                s.fx,
                s.fz,
                s.phase.as_str()
            )?;
        }
        Ok(())
    }
}

fn sample(state: &SimState, model: &RobotModel, tau: [f64; 2], wrench: Wrench) -> TraceSample {
    let geo = state.leg(model);
    TraceSample {
        t: state.time,
        base_x: state.base.x,
        base_z: state.base.y,
        theta1: state.q[0],
        theta2: state.q[1],
        omega_h: state.qd[0],
        omega_k: state.qd[1],
        tau_h: tau[0],
        tau_k: tau[1],
        l: geo.length,
        alpha: geo.alpha,
        fx: wrench.fx,
        fz: wrench.fz,
        phase: state.phase,
    }
}

/// Freezes the joints, conserving linear momentum.
fn enter_flight(state: &SimState, model: &RobotModel) -> SimState {
    SimState {
        phase: Phase::Flight,
        base_velocity: plant::com_velocity(model, &state.q, &state.qd),
        qd: Vector2::zeros(),
        ..*state
    }
}

/// Simulates one jump from rest with the hip at `x0`.
pub fn rollout_from(model: &RobotModel, params: &ControllerParams, config: &SimConfig, x0: f64) -> Result<JumpResult> {
    model.validate()?;
    params.validate()?;
    config.validate()?;

    let mut state = SimState::initial(model, config, x0)?;
    let limits = model.torque_limits();
    let mut trace = Vec::new();
    let mut tau_log: Vec<[f64; 2]> = Vec::new();
    let mut omega_log: Vec<[f64; 2]> = Vec::new();
    let mut max_height = state.base.y;
    let mut liftoff = None;
    let max_steps = (config.max_sim_time / config.dt).ceil() as usize;

    if config.record_trace {
        trace.push(sample(&state, model, [0.0; 2], Wrench::default()));
    }

    let mut termination = Termination::TimeLimit;
    for _ in 0..max_steps {
        match state.phase {
            Phase::Stance => {
                let (geo, leg) = state.leg_state(model);
                let wrench = vmc_wrench(&leg, params, model.total_mass(), model.gravity);
                let tau = joint_torques(&geo.jacobian, &wrench, limits);
                let tau_v = Vector2::new(tau[0], tau[1]);
                let Some(qdd) = plant::joint_accelerations(model, &state.q, &state.qd, &tau_v) else {
                    termination = Termination::NumericalFailure;
                    break;
                };
                let reaction = plant::ground_reaction(model, &state.q, &state.qd, &qdd);
                if !reaction.y.is_finite() {
                    termination = Termination::NumericalFailure;
                    break;
                }
                if reaction.y <= 0.0 {
                    state = enter_flight(&state, model);
                    liftoff = Some(Liftoff {
                        time: state.time,
                        height: state.base.y,
                        velocity: [state.base_velocity.x, state.base_velocity.y],
                        cause: LiftoffCause::ContactForce,
                    });
                    continue;
                }
                match stance_step(&state, tau, model, config) {
                    Ok(next) => {
                        state = next;
                        tau_log.push(tau);
                        omega_log.push([state.qd[0], state.qd[1]]);
                        max_height = max_height.max(state.base.y);
                        if config.record_trace {
                            trace.push(sample(&state, model, tau, wrench));
                        }
                        if state.base.y <= 0.0 {
                            termination = Termination::NoLiftoff;
                            break;
                        }
                    }
                    Err(StepFailure::Singular) => {
                        let extending = state.q[1] < std::f64::consts::FRAC_PI_2;
                        let rising = state.base_velocity.y > 0.0;
                        if config.liftoff_at_full_extension && extending && rising {
                            state = enter_flight(&state, model);
                            liftoff = Some(Liftoff {
                                time: state.time,
                                height: state.base.y,
                                velocity: [state.base_velocity.x, state.base_velocity.y],
                                cause: LiftoffCause::FullExtension,
                            });
                            continue;
                        }
                        termination = Termination::NoLiftoff;
                        break;
                    }
                    Err(StepFailure::NonFinite) => {
                        termination = Termination::NumericalFailure;
                        break;
                    }
                }
            }
            Phase::Flight => {
                let was_rising = state.base_velocity.y > 0.0;
                state = flight_step(&state, model, config);
                max_height = max_height.max(state.base.y);
                let foot_z = state.base.y + state.leg(model).foot.y;
                if foot_z < 0.0 && state.base_velocity.y < 0.0 {
                    state.phase = Phase::Landed;
                }
                if config.record_trace {
                    trace.push(sample(&state, model, [0.0; 2], Wrench::default()));
                }
                if state.phase == Phase::Landed {
                    termination = Termination::Landed;
                    break;
                }
                if config.stop_at_apex && (!was_rising || state.base_velocity.y <= 0.0) {
                    termination = Termination::Apex;
                    break;
                }
            }
            Phase::Landed => unreachable!("rollout stops on landing"),
        }
    }

    let energy = jump_energy(&tau_log, &omega_log, config.dt);
    if let Some(lo) = &liftoff {
        // Flight is ballistic, so the apex is known exactly.
        let vz = lo.velocity[1].max(0.0);
        max_height = max_height.max(lo.height + vz * vz / (2.0 * model.gravity));
    }
    let apex_height = match (liftoff, termination) {
        (_, Termination::NumericalFailure) | (None, _) => config.h0,
        _ => max_height,
    };
    if liftoff.is_none() && termination == Termination::TimeLimit {
        termination = Termination::NoLiftoff;
    }
    Ok(JumpResult {
        apex_height,
        energy,
        liftoff,
        termination,
        trace,
    })
}

/// Simulates one jump from rest with the hip at x = 0.
pub fn rollout(model: &RobotModel, params: &ControllerParams, config: &SimConfig) -> Result<JumpResult> {
    rollout_from(model, params, config, 0.0)
}
