//! Geometry, inverse kinematics and velocity Jacobians of the three planar architectures.
//!
//! Frames: the base frame has its origin at the circumcenter `O` of the base
//! triangle with `x` parallel to `A1A2`; the platform frame has its origin at
//! the circumcenter `P` of the platform triangle with `X` parallel to `C1C2`.
//! Platform twists are always ordered `(ṗx, ṗy, φ̇)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Rotation2, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Architecture, ValidatedDesign};

/// Polar angles of `A1, A2, A3` (and `C1, C2, C3` in the platform frame).
pub const VERTEX_ANGLES: [f64; 3] = [7.0 * PI / 6.0, 11.0 * PI / 6.0, FRAC_PI_2];

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// 2-D cross product `a × b` (z component).
#[inline]
pub(crate) fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Moving-platform pose: position of `P` in the base frame and orientation `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, phi: f64) -> Self {
        Pose {
            x,
            y,
            phi: wrap_angle(phi),
        }
    }

    /// Centers coincident, `φ = 0`.
    pub fn home() -> Self {
        Pose::new(0.0, 0.0, 0.0)
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.phi)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Pose::new(v.x, v.y, v.z)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.phi.is_finite()
    }
}

/// Inverse-kinematics root selector for one leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// PRR: larger slider root. RRR: elbow on the `+acos` side.
    #[serde(rename = "PLUS")]
    Plus,
    #[serde(rename = "MINUS")]
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// One branch per leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkingMode(pub [Branch; 3]);

impl Default for WorkingMode {
    fn default() -> Self {
        WorkingMode([Branch::Plus; 3])
    }
}

impl std::fmt::Display for WorkingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<&str> = self
            .0
            .iter()
            .map(|b| match b {
                Branch::Plus => "PLUS",
                Branch::Minus => "MINUS",
            })
            .collect();
        write!(f, "{}", s.join("/"))
    }
}

/// Anchor points of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorLayout {
    /// `A_i` in the base frame.
    pub base_points: [Vector2<f64>; 3],
    /// `C_i` in the platform frame.
    pub platform_points: [Vector2<f64>; 3],
    /// Platform vertex each leg is attached to, in the platform frame.
    pub leg_attachments: [Vector2<f64>; 3],
    /// PRR rail directions `u_i`, from `A_i` toward `A_{i+1}`.
    pub rail_directions: [Vector2<f64>; 3],
    /// PRR rail length (triangle side `√3·R`).
    pub rail_length: f64,
}

pub fn anchor_layout(design: &ValidatedDesign) -> AnchorLayout {
    let big_r = design.base_radius();
    let small_r = design.platform_radius();
    let polar = |radius: f64, angle: f64| Vector2::new(radius * angle.cos(), radius * angle.sin());
    let base_points = VERTEX_ANGLES.map(|a| polar(big_r, a));
    let platform_points = VERTEX_ANGLES.map(|a| polar(small_r, a));
    let rail_directions =
        [0, 1, 2].map(|i| (base_points[(i + 1) % 3] - base_points[i]).normalize());
    // Index pairing A_i-C_i makes the three RPR legs concurrent at P in the
    // home pose (a parallel singularity), so RPR legs attach to C_{i+1}.
    let leg_attachments = match design.architecture() {
        Architecture::Rpr => [0, 1, 2].map(|i| platform_points[(i + 1) % 3]),
        _ => platform_points,
    };
    AnchorLayout {
        base_points,
        platform_points,
        leg_attachments,
        rail_directions,
        rail_length: 3f64.sqrt() * big_r,
    }
}

/// Joint points and coordinates of one leg at a pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegSolution {
    /// Leg number, 0-based.
    pub index: usize,
    /// Slider travel `ρ` (m) for PRR, leg length `ρ` (m) for RPR, crank angle (rad) for RRR.
    pub actuated: f64,
    /// Relative angles of the two passive revolute joints, rad.
    pub passive: [f64; 2],
    pub branch: Branch,
    /// Base anchor `A_i`.
    pub base_point: Vector2<f64>,
    /// Proximal passive joint: slider `B_i` (PRR), `A_i` (RPR), elbow `B_i` (RRR).
    pub knee: Vector2<f64>,
    /// Platform anchor `C_i` in the base frame.
    pub platform_point: Vector2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum KinematicsError {
    #[error("leg {leg} cannot reach the pose")]
    Unreachable { leg: usize },
    #[error("leg {leg}: the requested branch violates the joint limits")]
    ModeViolation { leg: usize },
    #[error("forward kinematics refinement did not converge")]
    NoConvergence,
}

/// Actuated-rate side (`B`) and twist side (`A`) of `A·t = B·q̇`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianPair {
    pub parallel: Matrix3<f64>,
    pub serial: Matrix3<f64>,
}

impl JacobianPair {
    /// Forward map `A⁻¹B` from actuated rates to the twist, `None` at a parallel singularity.
    pub fn forward(&self) -> Option<Matrix3<f64>> {
        self.parallel.lu().solve(&self.serial)
    }
}

/// A validated design with its anchor layout, for repeated kinematic queries.
#[derive(Debug, Clone)]
pub struct Mechanism {
    design: ValidatedDesign,
    layout: AnchorLayout,
}

impl Mechanism {
    pub fn new(design: &ValidatedDesign) -> Self {
        Mechanism {
            design: *design,
            layout: anchor_layout(design),
        }
    }

    pub fn design(&self) -> &ValidatedDesign {
        &self.design
    }

    pub fn architecture(&self) -> Architecture {
        self.design.architecture()
    }

    pub fn layout(&self) -> &AnchorLayout {
        &self.layout
    }

    /// Platform attachment of `leg` in the base frame.
    pub fn platform_point(&self, pose: &Pose, leg: usize) -> Vector2<f64> {
        pose.position() + Rotation2::new(pose.phi) * self.layout.leg_attachments[leg]
    }

    /// Solves one leg without applying stroke limits.
    pub fn solve_leg(&self, pose: &Pose, leg: usize, branch: Branch) -> Result<LegSolution, KinematicsError> {
        let a = self.layout.base_points[leg];
        let c = self.platform_point(pose, leg);
        let p = pose.position();
        let link = self.design.link_length();
        let w = c - a;
        let (actuated, knee, first_angle) = match self.architecture() {
            Architecture::Prr => {
                let u = self.layout.rail_directions[leg];
                let b = u.dot(&w);
                let disc = b * b - w.norm_squared() + link * link;
                if disc.is_nan() || disc < 0.0 {
                    return Err(KinematicsError::Unreachable { leg });
                }
                let rho = b + branch.sign() * disc.sqrt();
                let knee = a + u * rho;
                let e = c - knee;
                let rail_angle = u.y.atan2(u.x);
                (rho, knee, wrap_angle(e.y.atan2(e.x) - rail_angle))
            }
            Architecture::Rpr => {
                let rho = w.norm();
                if rho.is_nan() || rho <= 0.0 {
                    return Err(KinematicsError::Unreachable { leg });
                }
                (rho, a, w.y.atan2(w.x))
            }
            Architecture::Rrr => {
                let d = w.norm();
                if d.is_nan() || d <= 0.0 || d > 2.0 * link {
                    return Err(KinematicsError::Unreachable { leg });
                }
                let half = (d / (2.0 * link)).min(1.0).acos();
                let theta = wrap_angle(w.y.atan2(w.x) + branch.sign() * half);
                let knee = a + Vector2::new(theta.cos(), theta.sin()) * link;
                (theta, knee, theta)
            }
        };
        // distal link direction and platform bar direction, for the relative joint angles
        let distal = c - knee;
        let distal_angle = distal.y.atan2(distal.x);
        let bar = p - c;
        let bar_angle = bar.y.atan2(bar.x);
        let passive = match self.architecture() {
            Architecture::Prr | Architecture::Rpr => [first_angle, wrap_angle(bar_angle - distal_angle)],
            Architecture::Rrr => [
                wrap_angle(distal_angle - first_angle),
                wrap_angle(bar_angle - distal_angle),
            ],
        };
        Ok(LegSolution {
            index: leg,
            actuated,
            passive,
            branch,
            base_point: a,
            knee,
            platform_point: c,
        })
    }

    /// Whether the actuated coordinate of `leg` respects the stroke limits.
    pub fn within_stroke(&self, sol: &LegSolution) -> bool {
        let link = self.design.link_length();
        match self.architecture() {
            Architecture::Prr => sol.actuated > 0.0 && sol.actuated < self.layout.rail_length,
            Architecture::Rpr => sol.actuated >= 0.5 * link && sol.actuated <= link,
            Architecture::Rrr => true,
        }
    }

    /// IK of all three legs without stroke limits.
    pub fn solve_legs(&self, pose: &Pose, mode: &WorkingMode) -> Result<[LegSolution; 3], KinematicsError> {
        Ok([
            self.solve_leg(pose, 0, mode.0[0])?,
            self.solve_leg(pose, 1, mode.0[1])?,
            self.solve_leg(pose, 2, mode.0[2])?,
        ])
    }

    pub fn inverse_kinematics(&self, pose: &Pose, mode: &WorkingMode) -> Result<[LegSolution; 3], KinematicsError> {
        let legs = self.solve_legs(pose, mode)?;
        for (leg, sol) in legs.iter().enumerate() {
            if !self.within_stroke(sol) {
                return Err(match self.architecture() {
                    Architecture::Rpr => KinematicsError::Unreachable { leg },
                    _ => KinematicsError::ModeViolation { leg },
                });
            }
        }
        Ok(legs)
    }

    /// Loop-closure residuals (m) of the three legs for actuated coordinates `q`.
    fn closure_residuals(&self, pose: &Pose, q: &[f64; 3]) -> Vector3<f64> {
        let link = self.design.link_length();
        let mut r = Vector3::zeros();
        for leg in 0..3 {
            let a = self.layout.base_points[leg];
            let c = self.platform_point(pose, leg);
            r[leg] = match self.architecture() {
                Architecture::Prr => {
                    let b = a + self.layout.rail_directions[leg] * q[leg];
                    ((c - b).norm_squared() - link * link) / (2.0 * link)
                }
                Architecture::Rpr => (c - a).norm() - q[leg],
                Architecture::Rrr => {
                    let b = a + Vector2::new(q[leg].cos(), q[leg].sin()) * link;
                    ((c - b).norm_squared() - link * link) / (2.0 * link)
                }
            };
        }
        r
    }

    /// Twist-side Jacobian of the closure residuals at fixed actuated coordinates.
    fn closure_gradient(&self, pose: &Pose, q: &[f64; 3]) -> Matrix3<f64> {
        let link = self.design.link_length();
        let p = pose.position();
        let mut m = Matrix3::zeros();
        for (leg, &ql) in q.iter().enumerate() {
            let a = self.layout.base_points[leg];
            let c = self.platform_point(pose, leg);
            let n = match self.architecture() {
                Architecture::Prr => (c - (a + self.layout.rail_directions[leg] * ql)) / link,
                Architecture::Rpr => (c - a).normalize(),
                Architecture::Rrr => (c - (a + Vector2::new(ql.cos(), ql.sin()) * link)) / link,
            };
            let s = c - p;
            m.set_row(leg, &Vector3::new(n.x, n.y, cross2(&s, &n)).transpose());
        }
        m
    }

    /// Newton iteration on the closure residuals, starting from `guess`.
    pub fn forward_refine(&self, q: &[f64; 3], guess: &Pose) -> Result<Pose, KinematicsError> {
        let mut x = guess.to_vector();
        let scale = self.design.base_radius().max(self.design.link_length());
        for _ in 0..50 {
            let pose = Pose { x: x.x, y: x.y, phi: x.z };
            let r = self.closure_residuals(&pose, q);
            if !r.iter().all(|v| v.is_finite()) {
                return Err(KinematicsError::NoConvergence);
            }
            let g = self.closure_gradient(&pose, q);
            let step = g.lu().solve(&(-r)).ok_or(KinematicsError::NoConvergence)?;
            x += step;
            if r.norm() <= 1e-13 * scale || step.norm() <= 1e-15 * scale {
                let done = Pose::from_vector(&x);
                let final_r = self.closure_residuals(&done, q);
                if final_r.norm() <= 1e-10 {
                    return Ok(done);
                }
                return Err(KinematicsError::NoConvergence);
            }
        }
        let done = Pose::from_vector(&x);
        if self.closure_residuals(&done, q).norm() <= 1e-10 {
            Ok(done)
        } else {
            Err(KinematicsError::NoConvergence)
        }
    }

    /// Velocity matrices of `A·(ṗx, ṗy, φ̇) = B·q̇`; each row is scaled to a unit leg direction.
    pub fn jacobian(&self, pose: &Pose, legs: &[LegSolution; 3]) -> JacobianPair {
        let p = pose.position();
        let mut parallel = Matrix3::zeros();
        let mut serial = Matrix3::zeros();
        for (i, leg) in legs.iter().enumerate() {
            let c = leg.platform_point;
            let s = c - p;
            let n = (c - leg.knee).normalize();
            parallel.set_row(i, &Vector3::new(n.x, n.y, cross2(&s, &n)).transpose());
            serial[(i, i)] = match self.architecture() {
                Architecture::Prr => n.dot(&self.layout.rail_directions[i]),
                Architecture::Rpr => 1.0,
                Architecture::Rrr => cross2(&(leg.knee - leg.base_point), &n),
            };
        }
        JacobianPair { parallel, serial }
    }
}

pub fn inverse_kinematics(
    design: &ValidatedDesign,
    pose: &Pose,
    mode: &WorkingMode,
) -> Result<[LegSolution; 3], KinematicsError> {
    Mechanism::new(design).inverse_kinematics(pose, mode)
}

pub fn forward_refine(design: &ValidatedDesign, q: &[f64; 3], guess: &Pose) -> Result<Pose, KinematicsError> {
    Mechanism::new(design).forward_refine(q, guess)
}

pub fn jacobian(design: &ValidatedDesign, pose: &Pose, legs: &[LegSolution; 3]) -> JacobianPair {
    Mechanism::new(design).jacobian(pose, legs)
}
