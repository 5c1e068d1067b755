//! Equations of motion of the foot-pinned leg carrying a non-rotating body.
//!
//! In stance the generalized coordinates are the joint angles. Three point
//! masses (hip cluster, thigh centre, shank centre) are written relative to
//! the foot anchor as sums of link directions, which gives their Jacobians
//! and velocity-product accelerations in closed form. Link rod inertia and
//! reflected rotor inertia enter the mass matrix only.

use nalgebra::{Matrix2, Vector2};

use super::kinematics::{link_dir, link_dir_prime};
use super::RobotModel;

/// A point mass at `anchor + a1·dir(θ1) + a2·dir(θ1+θ2)`.
#[derive(Debug, Clone, Copy)]
struct PointTerm {
    mass: f64,
    a1: f64,
    a2: f64,
}

fn point_terms(model: &RobotModel) -> [PointTerm; 3] {
    let (l1, l2) = (model.l1, model.l2);
    [
        PointTerm {
            mass: model.hip_cluster_mass(),
            a1: -l1,
            a2: -l2,
        },
        PointTerm {
            mass: model.thigh_mass,
            a1: -0.5 * l1,
            a2: -l2,
        },
        PointTerm {
            mass: model.shank_mass,
            a1: 0.0,
            a2: -0.5 * l2,
        },
    ]
}

impl PointTerm {
    fn position(&self, q: &Vector2<f64>) -> Vector2<f64> {
        self.a1 * link_dir(q[0]) + self.a2 * link_dir(q[0] + q[1])
    }

    fn jacobian(&self, q: &Vector2<f64>) -> Matrix2<f64> {
        let c1 = self.a1 * link_dir_prime(q[0]);
        let c2 = self.a2 * link_dir_prime(q[0] + q[1]);
        Matrix2::from_columns(&[c1 + c2, c2])
    }

    /// J̇·q̇ for this point.
    fn velocity_product(&self, q: &Vector2<f64>, qd: &Vector2<f64>) -> Vector2<f64> {
        let w1 = qd[0];
        let w2 = qd[0] + qd[1];
        -(self.a1 * w1 * w1 * link_dir(q[0]) + self.a2 * w2 * w2 * link_dir(q[0] + q[1]))
    }
}

/// Joint-space mass matrix.
pub fn mass_matrix(model: &RobotModel, q: &Vector2<f64>) -> Matrix2<f64> {
    let mut m = Matrix2::zeros();
    for p in point_terms(model) {
        let j = p.jacobian(q);
        m += p.mass * j.transpose() * j;
    }
    let i1 = model.thigh_mass * model.l1 * model.l1 / 12.0;
    let i2 = model.shank_mass * model.l2 * model.l2 / 12.0;
    m += Matrix2::new(i1 + i2, i2, i2, i2);
    let [rh, rk] = model.reflected_inertia();
    m[(0, 0)] += rh;
    m[(1, 1)] += rk;
    m
}

/// Coriolis/centrifugal and gravity generalized forces.
pub fn bias_forces(model: &RobotModel, q: &Vector2<f64>, qd: &Vector2<f64>) -> (Vector2<f64>, Vector2<f64>) {
    let mut coriolis = Vector2::zeros();
    let mut gravity = Vector2::zeros();
    let up = Vector2::new(0.0, model.gravity);
    for p in point_terms(model) {
        let jt = p.jacobian(q).transpose();
        coriolis += p.mass * jt * p.velocity_product(q, qd);
        gravity += p.mass * jt * up;
    }
    (coriolis, gravity)
}

/// Joint accelerations under joint torques `tau`; `None` if the mass matrix is singular.
pub fn joint_accelerations(
    model: &RobotModel,
    q: &Vector2<f64>,
    qd: &Vector2<f64>,
    tau: &Vector2<f64>,
) -> Option<Vector2<f64>> {
    let m = mass_matrix(model, q);
    let (c, g) = bias_forces(model, q, qd);
    m.try_inverse().map(|inv| inv * (tau - c - g))
}

/// Force the ground applies to the foot (N).
pub fn ground_reaction(model: &RobotModel, q: &Vector2<f64>, qd: &Vector2<f64>, qdd: &Vector2<f64>) -> Vector2<f64> {
    let mut f = Vector2::new(0.0, model.total_mass() * model.gravity);
    for p in point_terms(model) {
        f += p.mass * (p.jacobian(q) * qdd + p.velocity_product(q, qd));
    }
    f
}

/// Kinetic plus potential energy in stance, ground at z = 0 under the anchor.
pub fn stance_energy(model: &RobotModel, q: &Vector2<f64>, qd: &Vector2<f64>) -> f64 {
    let kinetic = 0.5 * qd.dot(&(mass_matrix(model, q) * qd));
    let potential: f64 = point_terms(model)
        .iter()
        .map(|p| p.mass * model.gravity * p.position(q).y)
        .sum();
    kinetic + potential
}

/// Velocity of the hip relative to the pinned foot.
pub fn hip_velocity(model: &RobotModel, q: &Vector2<f64>, qd: &Vector2<f64>) -> Vector2<f64> {
    point_terms(model)[0].jacobian(q) * qd
}

/// Centre-of-mass velocity of the whole robot in stance.
pub fn com_velocity(model: &RobotModel, q: &Vector2<f64>, qd: &Vector2<f64>) -> Vector2<f64> {
    let momentum: Vector2<f64> = point_terms(model).iter().map(|p| p.mass * (p.jacobian(q) * qd)).sum();
    momentum / model.total_mass()
}
