//! Planar 2R leg kinematics, expressed relative to the hip (base point).
//!
//! Link angles are measured from the downward vertical, positive towards +x:
//! the thigh points along `(sin θ1, −cos θ1)` and the shank along
//! `(sin(θ1+θ2), −cos(θ1+θ2))`. With θ2 ∈ (0, π) the knee sits behind the
//! hip-foot line. The leg angle α is a rotation about +y, so a foot at
//! `l·(−sin α, −cos α)` has deflection α.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

/// Direction of a link at absolute angle `phi`.
pub(crate) fn link_dir(phi: f64) -> Vector2<f64> {
    Vector2::new(phi.sin(), -phi.cos())
}

/// Derivative of [`link_dir`] with respect to `phi`.
pub(crate) fn link_dir_prime(phi: f64) -> Vector2<f64> {
    Vector2::new(phi.cos(), phi.sin())
}

/// Knee angles closer than this to 0 or π are treated as singular.
pub const SINGULAR_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegGeometry {
    /// Hip-to-foot distance (m).
    pub length: f64,
    /// Leg deflection about +y (rad).
    pub alpha: f64,
    /// Foot position relative to the hip (m), world axes (x, z).
    pub foot: Vector2<f64>,
    /// ∂foot/∂(θ1, θ2).
    pub jacobian: Matrix2<f64>,
    pub singular: bool,
}

pub fn leg_geometry(theta1: f64, theta2: f64, l1: f64, l2: f64) -> LegGeometry {
    let phi2 = theta1 + theta2;
    let foot = l1 * link_dir(theta1) + l2 * link_dir(phi2);
    let col2 = l2 * link_dir_prime(phi2);
    let col1 = l1 * link_dir_prime(theta1) + col2;
    let jacobian = Matrix2::from_columns(&[col1, col2]);
    let s = theta2.rem_euclid(std::f64::consts::PI);
    let singular = s < SINGULAR_MARGIN || std::f64::consts::PI - s < SINGULAR_MARGIN;
    LegGeometry {
        length: foot.norm(),
        alpha: (-foot.x).atan2(-foot.y),
        foot,
        jacobian,
        singular,
    }
}

/// Rates of leg length and deflection for foot velocity `foot_vel` (relative to hip).
pub fn polar_rates(foot: &Vector2<f64>, foot_vel: &Vector2<f64>) -> (f64, f64) {
    let l2 = foot.norm_squared();
    let l = l2.sqrt();
    let l_dot = foot.dot(foot_vel) / l;
    let alpha_dot = (foot.y * foot_vel.x - foot.x * foot_vel.y) / l2;
    (l_dot, alpha_dot)
}

/// Joint angles (knee-back branch) placing the foot at distance `length`
/// with deflection `alpha`.
pub fn inverse_kinematics(length: f64, alpha: f64, l1: f64, l2: f64) -> Result<(f64, f64)> {
    if !(length > (l1 - l2).abs() && length < l1 + l2) {
        return Err(Error::invalid(
            "initial leg length",
            format!("{length} m not reachable with links {l1} m and {l2} m (needs |l1-l2| < l < l1+l2)"),
        ));
    }
    let cos_knee = (length * length - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    let theta2 = cos_knee.clamp(-1.0, 1.0).acos();
    // Foot direction in link-angle convention is −α.
    let psi = -alpha;
    let offset = (l2 * theta2.sin()).atan2(l1 + l2 * theta2.cos());
    Ok((psi - offset, theta2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_leg() {
        let g = leg_geometry(0.0, 0.0, 0.4, 0.4);
        assert!((g.length - 0.8).abs() < 1e-15);
        assert!(g.alpha.abs() < 1e-15);
        assert!(g.singular);
    }

    #[test]
    fn right_angle_knee() {
        let g = leg_geometry(0.3, std::f64::consts::FRAC_PI_2, 0.4, 0.4);
        assert!((g.length - 0.4 * 2f64.sqrt()).abs() < 1e-12);
        assert!(!g.singular);
    }

    #[test]
    fn ik_round_trip() {
        for &(l, a) in &[(0.5, 0.0), (0.6, 0.2), (0.35, -0.3)] {
            let (t1, t2) = inverse_kinematics(l, a, 0.45, 0.35).unwrap();
            assert!(t2 > 0.0 && t2 < std::f64::consts::PI);
            let g = leg_geometry(t1, t2, 0.45, 0.35);
            assert!((g.length - l).abs() < 1e-12);
            assert!((g.alpha - a).abs() < 1e-12);
        }
        let (t1, t2) = inverse_kinematics(0.5, 0.0, 0.4, 0.4).unwrap();
        let g = leg_geometry(t1, t2, 0.4, 0.4);
        assert!(g.foot.x.abs() < 1e-12);
        // knee behind the hip
        assert!(0.4 * link_dir(t1).x < 0.0);
        assert!(inverse_kinematics(0.9, 0.0, 0.4, 0.4).is_err());
    }

    #[test]
    fn positive_alpha_moves_foot_backwards() {
        let (t1, t2) = inverse_kinematics(0.5, 0.2, 0.4, 0.4).unwrap();
        assert!(leg_geometry(t1, t2, 0.4, 0.4).foot.x < 0.0);
    }
}
