//! Dexterity and the constraint stack evaluated at a single pose.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector6};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{JacobianPair, Mechanism, Pose, WorkingMode};
use crate::model::{Architecture, ValidatedDesign, Wrench};
use crate::stiffness::{stiffness_indices, StiffnessIndices, StiffnessModel};

/// Frobenius-norm condition number `(1/m)·sqrt(tr(MᵀM)·tr((MᵀM)⁻¹))`; `+∞` when `M` is singular.
pub fn frobenius_condition(m: &DMatrix<f64>) -> f64 {
    assert!(m.is_square(), "condition number of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    // tr((MᵀM)⁻¹) = ‖M⁻¹‖²_F, which avoids squaring the conditioning
    let Some(inv) = m.clone().try_inverse() else {
        return f64::INFINITY;
    };
    let k = (m.norm_squared() * inv.norm_squared()).sqrt() / n as f64;
    if k.is_finite() {
        k.max(1.0)
    } else {
        f64::INFINITY
    }
}

fn frobenius_condition3(m: &Matrix3<f64>) -> f64 {
    let Some(inv) = m.try_inverse() else {
        return f64::INFINITY;
    };
    let k = (m.norm_squared() * inv.norm_squared()).sqrt() / 3.0;
    if k.is_finite() {
        k.max(1.0)
    } else {
        f64::INFINITY
    }
}

/// Length used to homogenize the rotational column of the Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum CharacteristicLength {
    /// Minimizes the condition number at the home pose.
    HomeOptimal,
    /// Fixed value in meters.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DexterityConfig {
    /// Minimum admissible inverse condition number.
    pub threshold: f64,
    pub characteristic_length: CharacteristicLength,
}

impl Default for DexterityConfig {
    fn default() -> Self {
        DexterityConfig {
            threshold: 0.1,
            characteristic_length: CharacteristicLength::HomeOptimal,
        }
    }
}

/// Minimum stiffness values for constraints g4 to g6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StiffnessThresholds {
    /// N/m (100 N over 0.1 mm)
    pub k_xy: f64,
    /// N/m (100 N over 1 mm)
    pub k_z: f64,
    /// N·m/rad (100 N·m over 1°)
    pub k_phiz: f64,
}

impl Default for StiffnessThresholds {
    fn default() -> Self {
        StiffnessThresholds {
            k_xy: 1e6,
            k_z: 1e5,
            k_phiz: 10.0 / (PI / 180.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PerformanceError {
    #[error("the home pose is not reachable")]
    HomeUnreachable,
    #[error("the home pose is singular; no characteristic length exists")]
    SingularHome,
}

const LC_RANGE: (f64, f64) = (1e-3, 10.0);

/// Condition number of the Jacobian with the rotational rate scaled by `lc`.
fn normalized_condition(forward: &Matrix3<f64>, lc: f64) -> f64 {
    let mut j = *forward;
    j.row_mut(2).scale_mut(lc);
    frobenius_condition3(&j)
}

/// Golden-section search of `f` over `ln x ∈ [ln lo, ln hi]` to `rel_tol` relative width.
fn golden_section_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    while b - a > rel_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp());
        }
    }
    (0.5 * (a + b)).exp()
}

/// Characteristic length of a design under `cfg`.
pub fn characteristic_length(mech: &Mechanism, mode: &WorkingMode, cfg: &DexterityConfig) -> Result<f64, PerformanceError> {
    match cfg.characteristic_length {
        CharacteristicLength::Fixed(v) => Ok(v),
        CharacteristicLength::HomeOptimal => {
            let home = Pose::home();
            let legs = mech
                .solve_legs(&home, mode)
                .map_err(|_| PerformanceError::HomeUnreachable)?;
            let forward = mech
                .jacobian(&home, &legs)
                .forward()
                .ok_or(PerformanceError::SingularHome)?;
            if !frobenius_condition3(&forward).is_finite() {
                return Err(PerformanceError::SingularHome);
            }
            Ok(golden_section_log(
                |lc| normalized_condition(&forward, lc),
                LC_RANGE.0,
                LC_RANGE.1,
                1e-4,
            ))
        }
    }
}

/// Inverse condition number `κ⁻¹ ∈ [0, 1]` of the normalized Jacobian `A⁻¹B`; 0 at a parallel singularity.
pub fn inverse_condition(jac: &JacobianPair, characteristic_length: f64) -> f64 {
    match jac.forward() {
        Some(forward) => {
            let k = normalized_condition(&forward, characteristic_length);
            if k.is_finite() {
                1.0 / k
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

/// Everything a pose-level check needs besides the design itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Criteria {
    pub dexterity: DexterityConfig,
    pub thresholds: StiffnessThresholds,
    pub stiffness: StiffnessModel,
    pub wrench: Wrench,
    pub mode: WorkingMode,
}

/// Pass/fail table of the constraints at one pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    pub pose: Pose,
    pub g1_geometry: bool,
    pub ik_reachable: bool,
    pub g2_stroke: bool,
    pub g3_dexterity: bool,
    pub inverse_condition: f64,
    pub g4_kxy: bool,
    pub g5_kz: bool,
    pub g6_kphiz: bool,
    pub indices: Option<StiffnessIndices>,
    /// Platform deflection `(δx, δy, δz, δφx, δφy, δφz)` under the configured wrench.
    pub deflection: Option<Vector6<f64>>,
    pub overall: bool,
}

impl ConstraintReport {
    /// Sum of relative shortfalls of the continuous constraints; 0 when all of them hold.
    pub fn violation(&self, criteria: &Criteria) -> f64 {
        let mut v = 0.0;
        if !self.g1_geometry {
            v += 1.0;
        }
        if !self.ik_reachable {
            return v + 10.0;
        }
        if !self.g2_stroke {
            v += 1.0;
        }
        let shortfall = |value: f64, min: f64| ((min - value) / min).max(0.0);
        v += shortfall(self.inverse_condition, criteria.dexterity.threshold);
        match self.indices {
            Some(idx) => {
                v += shortfall(idx.k_xy_min, criteria.thresholds.k_xy);
                v += shortfall(idx.k_z_min, criteria.thresholds.k_z);
                v += shortfall(idx.k_phiz_min, criteria.thresholds.k_phiz);
            }
            None => v += 3.0,
        }
        v
    }
}

/// `L_b + r ≥ R/2`.
pub fn geometry_constraint(design: &ValidatedDesign) -> bool {
    design.link_length() + design.platform_radius() >= 0.5 * design.base_radius()
}

/// A design paired with its resolved characteristic length, ready for pose queries.
#[derive(Debug, Clone)]
pub struct DesignAnalyzer {
    mech: Mechanism,
    criteria: Criteria,
    characteristic_length: f64,
    g1: bool,
}

impl DesignAnalyzer {
    pub fn new(design: &ValidatedDesign, criteria: &Criteria) -> Result<Self, PerformanceError> {
        let mech = Mechanism::new(design);
        let characteristic_length = characteristic_length(&mech, &criteria.mode, &criteria.dexterity)?;
        Ok(DesignAnalyzer {
            g1: geometry_constraint(design),
            mech,
            criteria: *criteria,
            characteristic_length,
        })
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.mech
    }

    pub fn criteria(&self) -> &Criteria {
        &self.criteria
    }

    pub fn characteristic_length(&self) -> f64 {
        self.characteristic_length
    }

    pub fn architecture(&self) -> Architecture {
        self.mech.architecture()
    }

    /// Full report at `pose`; nothing is skipped.
    pub fn evaluate(&self, pose: &Pose) -> ConstraintReport {
        let mut report = ConstraintReport {
            pose: *pose,
            g1_geometry: self.g1,
            ik_reachable: false,
            g2_stroke: false,
            g3_dexterity: false,
            inverse_condition: 0.0,
            g4_kxy: false,
            g5_kz: false,
            g6_kphiz: false,
            indices: None,
            deflection: None,
            overall: false,
        };
        let Ok(legs) = self.mech.solve_legs(pose, &self.criteria.mode) else {
            return report;
        };
        report.ik_reachable = true;
        report.g2_stroke = legs.iter().all(|l| self.mech.within_stroke(l));
        let jac = self.mech.jacobian(pose, &legs);
        report.inverse_condition = inverse_condition(&jac, self.characteristic_length);
        report.g3_dexterity = report.inverse_condition >= self.criteria.dexterity.threshold;
        if let Ok(k) = self.criteria.stiffness.platform_stiffness_for(&self.mech, pose, &legs) {
            if let Ok(idx) = stiffness_indices(&k) {
                let t = &self.criteria.thresholds;
                report.g4_kxy = idx.k_xy_min >= t.k_xy;
                report.g5_kz = idx.k_z_min >= t.k_z;
                report.g6_kphiz = idx.k_phiz_min >= t.k_phiz;
                report.indices = Some(idx);
                let w = &self.criteria.wrench;
                let wrench = Vector6::new(w.force[0], w.force[1], w.force[2], w.torque[0], w.torque[1], w.torque[2]);
                report.deflection = k.cholesky().map(|ch| ch.solve(&wrench));
            }
        }
        report.overall = report.g1_geometry
            && report.ik_reachable
            && report.g2_stroke
            && report.g3_dexterity
            && report.g4_kxy
            && report.g5_kz
            && report.g6_kphiz;
        report
    }

    /// Same verdict as `evaluate(pose).overall`, stopping at the first failed check.
    pub fn passes(&self, pose: &Pose) -> bool {
        if !self.g1 {
            return false;
        }
        let Ok(legs) = self.mech.solve_legs(pose, &self.criteria.mode) else {
            return false;
        };
        if !legs.iter().all(|l| self.mech.within_stroke(l)) {
            return false;
        }
        let jac = self.mech.jacobian(pose, &legs);
        if inverse_condition(&jac, self.characteristic_length) < self.criteria.dexterity.threshold {
            return false;
        }
        let Ok(k) = self.criteria.stiffness.platform_stiffness_for(&self.mech, pose, &legs) else {
            return false;
        };
        let Ok(idx) = stiffness_indices(&k) else {
            return false;
        };
        let t = &self.criteria.thresholds;
        idx.k_xy_min >= t.k_xy && idx.k_z_min >= t.k_z && idx.k_phiz_min >= t.k_phiz
    }
}

/// One-shot constraint evaluation of `design` at `pose`.
pub fn evaluate_constraints(
    design: &ValidatedDesign,
    pose: &Pose,
    criteria: &Criteria,
) -> Result<ConstraintReport, PerformanceError> {
    Ok(DesignAnalyzer::new(design, criteria)?.evaluate(pose))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, Bounds, DesignVector};

    #[test]
    fn identity_is_perfectly_conditioned() {
        for n in [2, 3, 6] {
            assert!((frobenius_condition(&DMatrix::identity(n, n)) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diag_one_two() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        assert_eq!(frobenius_condition(&m), 1.25);
    }

    #[test]
    fn singular_is_infinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(frobenius_condition(&m), f64::INFINITY);
    }

    #[test]
    fn scalar_homogeneity() {
        let jac = JacobianPair {
            parallel: Matrix3::new(1.0, 0.2, 0.3, -0.1, 0.9, 0.4, 0.3, -0.5, 1.1),
            serial: Matrix3::from_diagonal(&nalgebra::Vector3::new(0.8, 0.6, 0.9)),
        };
        let scaled = JacobianPair {
            parallel: jac.parallel * -3.5,
            serial: jac.serial * -3.5,
        };
        let a = inverse_condition(&jac, 0.7);
        let b = inverse_condition(&scaled, 0.7);
        assert!((a - b).abs() < 1e-14);
        assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn singular_pair_gives_zero() {
        let jac = JacobianPair {
            parallel: Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0),
            serial: Matrix3::identity(),
        };
        assert_eq!(inverse_condition(&jac, 1.0), 0.0);
    }

    #[test]
    fn fixed_length_passthrough() {
        let d = DesignVector::new(Architecture::Prr, 1.412, 0.319, 0.62, 0.026, 0.023);
        let mech = Mechanism::new(&validate(&d, &Bounds::default()).unwrap());
        let cfg = DexterityConfig {
            threshold: 0.1,
            characteristic_length: CharacteristicLength::Fixed(1.0),
        };
        assert_eq!(characteristic_length(&mech, &WorkingMode::default(), &cfg), Ok(1.0));
    }

    #[test]
    fn golden_section_finds_log_minimum() {
        let x = golden_section_log(|x: f64| (x.ln() - 0.3f64.ln()).powi(2), 1e-3, 10.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-6);
    }

    #[test]
    fn g1_is_pose_independent() {
        let d = DesignVector::new(Architecture::Prr, 4.0, 0.5, 1.0, 0.05, 0.05);
        let v = validate(&d, &Bounds::default()).unwrap();
        assert!(!geometry_constraint(&v));
    }
}
