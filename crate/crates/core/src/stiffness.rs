//! Lumped virtual-spring stiffness model of the legs and the platform.
//!
//! Every leg is a rigid chain with one 1-dof actuator spring and one 6-dof
//! spring per link (intermediate links and the platform bar `C_iP`). All
//! screws are expressed at the platform center `P`, base-frame axes, ordered
//! `(δx, δy, δz, δφx, δφy, δφz)`.

use nalgebra::{DMatrix, Dyn, Matrix2, Matrix3, Matrix6, OMatrix, SMatrix, Vector2, Vector3, Vector6, U6};
use thiserror::Error;

use crate::kinematics::{KinematicsError, LegSolution, Mechanism, Pose, WorkingMode};
use crate::model::{ActuatorStiffness, Architecture, Material};

pub type Compliance6 = Matrix6<f64>;
pub type StiffnessMatrix6 = Matrix6<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StiffnessError {
    #[error("beam length and section radius must be strictly positive")]
    DegenerateBeam,
    #[error("leg {leg}: kinetostatic system is singular")]
    SingularKinetostatics { leg: usize },
    #[error("Cartesian stiffness matrix is singular")]
    SingularStiffness,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Tip compliance of a clamped circular beam of length `length`, local `x` along the beam.
pub fn beam_compliance(length: f64, section_radius: f64, material: &Material) -> Result<Compliance6, StiffnessError> {
    if !(length > 0.0 && section_radius > 0.0) || !length.is_finite() || !section_radius.is_finite() {
        return Err(StiffnessError::DegenerateBeam);
    }
    let e = material.young_modulus;
    let g = material.shear_modulus;
    let area = std::f64::consts::PI * section_radius.powi(2);
    let i_yz = std::f64::consts::PI * section_radius.powi(4) / 4.0;
    let i_x = 2.0 * i_yz;
    let l = length;
    let mut c = Matrix6::zeros();
    c[(0, 0)] = l / (e * area);
    c[(1, 1)] = l.powi(3) / (3.0 * e * i_yz);
    c[(2, 2)] = l.powi(3) / (3.0 * e * i_yz);
    c[(3, 3)] = l / (g * i_x);
    c[(4, 4)] = l / (e * i_yz);
    c[(5, 5)] = l / (e * i_yz);
    c[(1, 5)] = l * l / (2.0 * e * i_yz);
    c[(5, 1)] = c[(1, 5)];
    c[(2, 4)] = -l * l / (2.0 * e * i_yz);
    c[(4, 2)] = c[(2, 4)];
    Ok(c)
}

/// Spring stack of one leg.
#[derive(Debug, Clone)]
pub struct LegSpringModel {
    /// Block-diagonal compliance of all spring coordinates, in chain order.
    pub k_theta_inv: DMatrix<f64>,
    /// Screws of the spring coordinates at `P`.
    pub j_theta: OMatrix<f64, U6, Dyn>,
    /// Screws of the two passive revolute joints at `P`.
    pub j_q: SMatrix<f64, 6, 2>,
    /// Sizes of the diagonal blocks of `k_theta_inv`.
    pub blocks: Vec<usize>,
}

impl LegSpringModel {
    pub fn spring_count(&self) -> usize {
        self.j_theta.ncols()
    }

    /// `S_θ = J_θ K_θ⁻¹ J_θᵀ`.
    pub fn spring_compliance(&self) -> Matrix6<f64> {
        let s = &self.j_theta * &self.k_theta_inv * self.j_theta.transpose();
        Matrix6::from_fn(|i, j| 0.5 * (s[(i, j)] + s[(j, i)]))
    }
}

fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Maps a twist given in a frame at `origin` rotated by `angle` about z to a twist at `p`.
fn adjoint_to(p: &Vector2<f64>, origin: &Vector2<f64>, angle: f64) -> Matrix6<f64> {
    let r = rot_z(angle);
    let d = Vector3::new(p.x - origin.x, p.y - origin.y, 0.0);
    let mut ad = Matrix6::zeros();
    ad.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    ad.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
    ad.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-skew(&d) * r));
    ad
}

/// Unit screw at `p` of a z-axis revolute joint through `joint`.
fn revolute_screw(p: &Vector2<f64>, joint: &Vector2<f64>) -> Vector6<f64> {
    let d = p - joint;
    Vector6::new(-d.y, d.x, 0.0, 0.0, 0.0, 1.0)
}

fn direction_angle(from: &Vector2<f64>, to: &Vector2<f64>) -> f64 {
    let d = to - from;
    d.y.atan2(d.x)
}

#[allow(clippy::large_enum_variant)]
enum Spring {
    Actuator { screw: Vector6<f64>, stiffness: f64 },
    Beam { adjoint: Matrix6<f64>, compliance: Compliance6 },
}

/// Builds the spring stack of one leg at its current configuration.
pub fn leg_spring_model(
    mech: &Mechanism,
    leg: &LegSolution,
    pose: &Pose,
    material: &Material,
    actuators: &ActuatorStiffness,
) -> Result<LegSpringModel, StiffnessError> {
    let design = mech.design();
    let p = pose.position();
    let link = design.link_length();
    let r_j = design.leg_section_radius();
    let a = leg.base_point;
    let b = leg.knee;
    let c = leg.platform_point;

    let platform_bar = Spring::Beam {
        adjoint: adjoint_to(&p, &p, direction_angle(&c, &p)),
        compliance: beam_compliance((p - c).norm(), design.platform_section_radius(), material)?,
    };
    let k_act = actuators.for_architecture(mech.architecture());
    let springs = match mech.architecture() {
        Architecture::Prr => {
            let u = mech.layout().rail_directions[leg.index];
            vec![
                Spring::Actuator {
                    screw: Vector6::new(u.x, u.y, 0.0, 0.0, 0.0, 0.0),
                    stiffness: k_act,
                },
                Spring::Beam {
                    adjoint: adjoint_to(&p, &c, direction_angle(&b, &c)),
                    compliance: beam_compliance(link, r_j, material)?,
                },
                platform_bar,
            ]
        }
        Architecture::Rpr => {
            let n = (c - a).normalize();
            vec![
                Spring::Beam {
                    adjoint: adjoint_to(&p, &c, direction_angle(&a, &c)),
                    compliance: beam_compliance(leg.actuated, r_j, material)?,
                },
                Spring::Actuator {
                    screw: Vector6::new(n.x, n.y, 0.0, 0.0, 0.0, 0.0),
                    stiffness: k_act,
                },
                platform_bar,
            ]
        }
        Architecture::Rrr => vec![
            Spring::Actuator {
                screw: revolute_screw(&p, &a),
                stiffness: k_act,
            },
            Spring::Beam {
                adjoint: adjoint_to(&p, &b, direction_angle(&a, &b)),
                compliance: beam_compliance(link, r_j, material)?,
            },
            Spring::Beam {
                adjoint: adjoint_to(&p, &c, direction_angle(&b, &c)),
                compliance: beam_compliance(link, r_j, material)?,
            },
            platform_bar,
        ],
    };

    let blocks: Vec<usize> = springs
        .iter()
        .map(|s| match s {
            Spring::Actuator { .. } => 1,
            Spring::Beam { .. } => 6,
        })
        .collect();
    let n: usize = blocks.iter().sum();
    let mut j_theta = OMatrix::<f64, U6, Dyn>::zeros(n);
    let mut k_theta_inv = DMatrix::zeros(n, n);
    let mut col = 0;
    for spring in &springs {
        match spring {
            Spring::Actuator { screw, stiffness } => {
                j_theta.set_column(col, screw);
                k_theta_inv[(col, col)] = 1.0 / stiffness;
                col += 1;
            }
            Spring::Beam { adjoint, compliance } => {
                j_theta.fixed_columns_mut::<6>(col).copy_from(adjoint);
                k_theta_inv.fixed_view_mut::<6, 6>(col, col).copy_from(compliance);
                col += 6;
            }
        }
    }
    let mut j_q = SMatrix::<f64, 6, 2>::zeros();
    j_q.set_column(0, &revolute_screw(&p, &b));
    j_q.set_column(1, &revolute_screw(&p, &c));
    Ok(LegSpringModel {
        k_theta_inv,
        j_theta,
        j_q,
        blocks,
    })
}

/// Reduces the spring stack to the leg's Cartesian stiffness by eliminating the passive joints.
///
/// Solves `[[S_θ, J_q], [J_qᵀ, 0]]·[f; δq] = [δt; 0]` with a fully pivoted LU
/// factorization; the top-left block of the inverse is `K_i`.
pub fn leg_cartesian_stiffness(model: &LegSpringModel) -> Result<StiffnessMatrix6, StiffnessError> {
    leg_stiffness_from(model.spring_compliance(), &model.j_q).ok_or(StiffnessError::SingularKinetostatics { leg: 0 })
}

fn leg_stiffness_from(s: Matrix6<f64>, j_q: &SMatrix<f64, 6, 2>) -> Option<StiffnessMatrix6> {
    // Equilibrate: unit-norm passive screws and an S block of order one.
    let col_norms = Vector2::new(j_q.column(0).norm(), j_q.column(1).norm());
    if col_norms.min().is_nan() || col_norms.min() <= 0.0 {
        return None;
    }
    let s_scale = s.amax();
    if !s_scale.is_finite() || s_scale <= 0.0 {
        return None;
    }
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    m.fixed_view_mut::<6, 6>(0, 0).copy_from(&(s / s_scale));
    for k in 0..2 {
        let col = j_q.column(k) / col_norms[k];
        m.fixed_view_mut::<6, 1>(0, 6 + k).copy_from(&col);
        m.fixed_view_mut::<1, 6>(6 + k, 0).copy_from(&col.transpose());
    }
    let mut rhs = SMatrix::<f64, 8, 6>::zeros();
    rhs.fixed_view_mut::<6, 6>(0, 0).fill_with_identity();
    let lu = m.full_piv_lu();
    if !lu.is_invertible() {
        return None;
    }
    let x = lu.solve(&rhs)?;
    let k = x.fixed_view::<6, 6>(0, 0) / s_scale;
    let k = Matrix6::from_fn(|i, j| 0.5 * (k[(i, j)] + k[(j, i)]));
    if k.iter().all(|v| v.is_finite()) {
        Some(k)
    } else {
        None
    }
}

/// Spring and actuator data needed to assemble stiffness matrices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StiffnessModel {
    pub material: Material,
    pub actuators: ActuatorStiffness,
}

impl StiffnessModel {
    pub fn leg_stiffness(
        &self,
        mech: &Mechanism,
        pose: &Pose,
        legs: &[LegSolution; 3],
    ) -> Result<[StiffnessMatrix6; 3], StiffnessError> {
        let mut out = [Matrix6::zeros(); 3];
        for (i, leg) in legs.iter().enumerate() {
            let model = leg_spring_model(mech, leg, pose, &self.material, &self.actuators)?;
            out[i] = leg_stiffness_from(model.spring_compliance(), &model.j_q)
                .ok_or(StiffnessError::SingularKinetostatics { leg: i })?;
        }
        Ok(out)
    }

    /// `K = K_1 + K_2 + K_3` for already-solved legs.
    pub fn platform_stiffness_for(
        &self,
        mech: &Mechanism,
        pose: &Pose,
        legs: &[LegSolution; 3],
    ) -> Result<StiffnessMatrix6, StiffnessError> {
        let k = self.leg_stiffness(mech, pose, legs)?;
        Ok(k[0] + k[1] + k[2])
    }
}

/// Aggregate Cartesian stiffness at `pose` in working mode `mode`.
pub fn platform_stiffness(
    mech: &Mechanism,
    pose: &Pose,
    mode: &WorkingMode,
    model: &StiffnessModel,
) -> Result<StiffnessMatrix6, StiffnessError> {
    let legs = mech.solve_legs(pose, mode)?;
    model.platform_stiffness_for(mech, pose, &legs)
}

/// Worst-case planar translational, vertical, and in-plane rotational stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessIndices {
    /// N/m
    pub k_xy_min: f64,
    /// N/m
    pub k_z_min: f64,
    /// N·m/rad
    pub k_phiz_min: f64,
}

pub fn stiffness_indices(k: &StiffnessMatrix6) -> Result<StiffnessIndices, StiffnessError> {
    let c = k
        .cholesky()
        .map(|ch| ch.inverse())
        .or_else(|| k.try_inverse())
        .ok_or(StiffnessError::SingularStiffness)?;
    let c_xy = Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]);
    let sigma_max = largest_singular_value(&c_xy);
    let out = StiffnessIndices {
        k_xy_min: 1.0 / sigma_max,
        k_z_min: 1.0 / c[(2, 2)],
        k_phiz_min: 1.0 / c[(5, 5)],
    };
    if out.k_xy_min.is_finite() && out.k_z_min.is_finite() && out.k_phiz_min.is_finite() {
        Ok(out)
    } else {
        Err(StiffnessError::SingularStiffness)
    }
}

pub(crate) fn largest_singular_value(m: &Matrix2<f64>) -> f64 {
    let g = m.transpose() * m;
    let half_trace = 0.5 * (g[(0, 0)] + g[(1, 1)]);
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let disc = (half_trace * half_trace - det).max(0.0);
    (half_trace + disc.sqrt()).sqrt()
}
