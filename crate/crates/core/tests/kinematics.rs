mod common;

use common::*;
use nalgebra::{Matrix3, Vector3};
use ppm_core::kinematics::*;
use ppm_core::model::Architecture;
use proptest::prelude::*;

fn actuated(legs: &[LegSolution; 3]) -> Vector3<f64> {
    Vector3::new(legs[0].actuated, legs[1].actuated, legs[2].actuated)
}

/// `∂q/∂t` from central differences of the inverse kinematics.
fn ik_derivative(mech: &Mechanism, pose: &Pose, mode: &WorkingMode, h: f64) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for k in 0..3 {
        let mut dv = Vector3::zeros();
        dv[k] = h;
        let plus = mech.solve_legs(&Pose::from_vector(&(pose.to_vector() + dv)), mode).unwrap();
        let minus = mech.solve_legs(&Pose::from_vector(&(pose.to_vector() - dv)), mode).unwrap();
        let mut col = actuated(&plus) - actuated(&minus);
        if mech.architecture() == Architecture::Rrr {
            col = col.map(wrap_angle);
        }
        m.set_column(k, &(col / (2.0 * h)));
    }
    m
}

#[test]
fn velocity_equation_matches_finite_differences() {
    let mut rng = rng(21);
    for a in Architecture::ALL {
        for _ in 0..50 {
            let (mech, pose, mode, legs) = random_configuration(&mut rng, a);
            let jac = mech.jacobian(&pose, &legs);
            let fd = ik_derivative(&mech, &pose, &mode, 1e-6);
            // A·t = B·q̇  ⇒  q̇ = B⁻¹A·t
            let expected = jac.serial.try_inverse().unwrap() * jac.parallel;
            let err = (fd - expected).amax() / expected.amax();
            assert!(err < 1e-6, "{a:?}: relative error {err:e}");
            let forward = jac.forward().unwrap();
            assert!((forward * expected - Matrix3::identity()).amax() < 1e-8);
        }
    }
}

#[test]
fn forward_refinement_inverts_inverse_kinematics() {
    let mut rng = rng(22);
    for a in Architecture::ALL {
        for _ in 0..200 {
            let (mech, pose, _, legs) = random_configuration(&mut rng, a);
            let q = [legs[0].actuated, legs[1].actuated, legs[2].actuated];
            let guess = Pose::new(pose.x + 1e-3, pose.y - 1e-3, pose.phi + 1e-3);
            let back = mech.forward_refine(&q, &guess).unwrap();
            assert!((back.to_vector() - pose.to_vector()).amax() < 1e-8, "{a:?}");
        }
    }
}

#[test]
fn anchor_layout_examples() {
    let d = validated(Architecture::Prr, [1.0, 0.319, 1.0, 0.01, 0.01]);
    let l = anchor_layout(&d);
    let h = 3f64.sqrt() / 2.0;
    assert!((l.base_points[2] - nalgebra::Vector2::new(0.0, 1.0)).norm() < 1e-15);
    assert!((l.base_points[0] - nalgebra::Vector2::new(-h, -0.5)).norm() < 1e-15);
    assert!((l.base_points[1] - nalgebra::Vector2::new(h, -0.5)).norm() < 1e-15);
    assert!(((l.base_points[1] - l.base_points[0]).norm() - 3f64.sqrt()).abs() < 1e-15);
    assert!((l.rail_length - 3f64.sqrt()).abs() < 1e-15);
    for c in &l.platform_points {
        assert!((c.norm() - 0.319).abs() < 1e-15);
    }
    assert!((l.platform_points[0].y - l.platform_points[1].y).abs() < 1e-15);
}

#[test]
fn stretched_rrr_leg_is_serial_singular() {
    // R - r = 2 L_b at the home pose: every leg fully stretched
    let d = validated(Architecture::Rrr, [2.0, 1.0, 0.5, 0.01, 0.01]);
    let mech = Mechanism::new(&d);
    let legs = mech.solve_legs(&Pose::home(), &WorkingMode::default()).unwrap();
    let jac = mech.jacobian(&Pose::home(), &legs);
    assert!(jac.serial.determinant().abs() < 1e-9);
    let other = mech.solve_legs(&Pose::home(), &WorkingMode([Branch::Minus; 3])).unwrap();
    for (p, m) in legs.iter().zip(&other) {
        assert!((p.knee - m.knee).norm() < 1e-6);
    }
}

#[test]
fn branch_fixed_solutions_vary_continuously() {
    let mut rng = rng(23);
    for a in [Architecture::Prr, Architecture::Rrr] {
        let (mech, pose, mode, _) = random_configuration(&mut rng, a);
        let target = Pose::new(pose.x + 0.02, pose.y - 0.01, pose.phi + 0.02);
        let mut prev = mech.solve_legs(&pose, &mode).unwrap();
        for k in 1..=200 {
            let t = k as f64 / 200.0;
            let p = Pose::new(
                pose.x + t * (target.x - pose.x),
                pose.y + t * (target.y - pose.y),
                pose.phi + t * (target.phi - pose.phi),
            );
            let Ok(next) = mech.solve_legs(&p, &mode) else { break };
            for (n, o) in next.iter().zip(&prev) {
                assert!((n.knee - o.knee).norm() < 5e-3, "{a:?}: knee jumped");
            }
            prev = next;
        }
    }
}

#[test]
fn non_finite_guess_does_not_converge() {
    let d = validated(Architecture::Prr, [1.0, 0.3, 0.5, 0.01, 0.01]);
    let mech = Mechanism::new(&d);
    let legs = mech.solve_legs(&Pose::home(), &WorkingMode::default()).unwrap();
    let q = [legs[0].actuated, legs[1].actuated, legs[2].actuated];
    let r = mech.forward_refine(&q, &Pose::new(f64::NAN, 0.0, 0.0));
    assert_eq!(r, Err(KinematicsError::NoConvergence));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_resubstitution(seed in 0u64..100_000) {
        let mut rng = rng(seed);
        let a = Architecture::ALL[(seed % 3) as usize];
        let (mech, pose, _, legs) = random_configuration(&mut rng, a);
        let link = mech.design().link_length();
        for leg in &legs {
            let c = mech.platform_point(&pose, leg.index);
            let err = match a {
                Architecture::Rpr => ((c - leg.base_point).norm() - leg.actuated).abs(),
                _ => ((c - leg.knee).norm() - link).abs(),
            };
            prop_assert!(err <= 1e-10);
        }
    }

    #[test]
    fn wrap_angle_is_idempotent(x in -100.0f64..100.0) {
        let w = wrap_angle(x);
        prop_assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
        prop_assert_eq!(wrap_angle(w), w);
        prop_assert!(((x - w) / std::f64::consts::TAU - ((x - w) / std::f64::consts::TAU).round()).abs() < 1e-9);
    }
}
