//! Inverse kinematics, velocity Jacobians and forward refinement for each architecture.

use ppm_core::kinematics::{Mechanism, Pose, WorkingMode};
use ppm_core::model::{validate, Architecture, Bounds, DesignVector, Lengths};

fn main() {
    let pose = Pose::new(0.1, -0.05, 5f64.to_radians());
    for (architecture, x) in [
        (Architecture::Prr, [1.2, 0.5, 1.0, 0.02, 0.02]),
        (Architecture::Rpr, [1.0, 0.5, 1.6, 0.02, 0.02]),
        (Architecture::Rrr, [1.2, 0.5, 1.0, 0.02, 0.02]),
    ] {
        let design = DesignVector {
            architecture,
            lengths: Lengths::from_array(x),
        };
        let mech = Mechanism::new(&validate(&design, &Bounds::default()).expect("within bounds"));
        let legs = match mech.inverse_kinematics(&pose, &WorkingMode::default()) {
            Ok(legs) => legs,
            Err(e) => {
                println!("{architecture}: {e}");
                continue;
            }
        };
        let q = [legs[0].actuated, legs[1].actuated, legs[2].actuated];
        let jac = mech.jacobian(&pose, &legs);
        let back = mech.forward_refine(&q, &Pose::home()).expect("refinement converges");
        println!("{architecture}: q = [{:.4}, {:.4}, {:.4}]", q[0], q[1], q[2]);
        println!("  det A = {:.4e}, det B = {:.4e}", jac.parallel.determinant(), jac.serial.determinant());
        println!("  forward refinement from home: ({:.6}, {:.6}, {:.6})", back.x, back.y, back.phi);
    }
}
