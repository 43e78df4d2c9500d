//! Worst-case stiffness indices of a 3-PRR design over a line of poses.

use ppm_core::kinematics::{Mechanism, Pose, WorkingMode};
use ppm_core::model::{validate, Architecture, Bounds, DesignVector, Lengths};
use ppm_core::stiffness::{platform_stiffness, stiffness_indices, StiffnessModel};

fn main() {
    let design = DesignVector {
        architecture: Architecture::Prr,
        lengths: Lengths::from_array([3.066, 1.283, 1.896, 0.036, 0.056]),
    };
    let mech = Mechanism::new(&validate(&design, &Bounds::default()).expect("within bounds"));
    let model = StiffnessModel::default();
    println!("x_m,k_xy_N_per_m,k_z_N_per_m,k_phiz_Nm_per_rad");
    for i in -5..=5 {
        let x = 0.1 * i as f64;
        match platform_stiffness(&mech, &Pose::new(x, 0.0, 0.0), &WorkingMode::default(), &model) {
            Ok(k) => {
                let idx = stiffness_indices(&k).expect("non-singular stiffness");
                println!("{x:.1},{:.4e},{:.4e},{:.4e}", idx.k_xy_min, idx.k_z_min, idx.k_phiz_min);
            }
            Err(e) => println!("{x:.1},{e}"),
        }
    }
}
