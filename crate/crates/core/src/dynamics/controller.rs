//! Virtual spring–damper controller and its joint-torque mapping.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gains of the virtual leg: axial spring K (N/m) and damper C (N·s/m),
/// torsional spring T (N·m/rad), rest length `l0` (m) and rest deflection
/// `alpha0` (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerParams {
    pub k: f64,
    pub c: f64,
    pub t: f64,
    pub l0: f64,
    #[serde(default)]
    pub alpha0: f64,
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("K", self.k), ("C", self.c), ("T", self.t)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.l0.is_finite() && self.l0 > 0.0) {
            return Err(Error::invalid("l0", "must be > 0"));
        }
        if !self.alpha0.is_finite() {
            return Err(Error::invalid("alpha0", "must be finite"));
        }
        Ok(())
    }
}

/// Leg length/deflection and their rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegState {
    pub l: f64,
    pub l_dot: f64,
    pub alpha: f64,
    pub alpha_dot: f64,
}

/// Force the foot exerts on the ground (N), world x and z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    pub fx: f64,
    pub fz: f64,
}

impl Wrench {
    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.fx, self.fz)
    }
}

/// Axial spring–damper force, positive when compressed.
pub fn axial_force(leg: &LegState, params: &ControllerParams) -> f64 {
    params.k * (params.l0 - leg.l) - params.c * leg.l_dot
}

pub fn torsional_torque(leg: &LegState, params: &ControllerParams) -> f64 {
    params.t * (params.alpha0 - leg.alpha)
}

/// Ground force commanded by the virtual leg, including the weight
/// feed-forward `m_total · g`. The ground pushes back with the opposite
/// force, so compression lifts the body.
pub fn vmc_wrench(leg: &LegState, params: &ControllerParams, total_mass: f64, gravity: f64) -> Wrench {
    let f_l = axial_force(leg, params);
    let tau_t = torsional_torque(leg, params);
    let (s, c) = leg.alpha.sin_cos();
    Wrench {
        fz: -f_l * c + tau_t / leg.l * s - total_mass * gravity,
        fx: -f_l * s - tau_t / leg.l * c,
    }
}

/// τ = Jᵀ F, each joint clamped to ±limit.
pub fn joint_torques(jacobian: &Matrix2<f64>, wrench: &Wrench, limits: [f64; 2]) -> [f64; 2] {
    let tau = jacobian.transpose() * wrench.as_vector();
    [tau[0].clamp(-limits[0], limits[0]), tau[1].clamp(-limits[1], limits[1])]
}
