//! Characteristic length and inverse condition number across the orientation range.

use ppm_core::kinematics::{Mechanism, Pose, WorkingMode};
use ppm_core::model::{validate, Architecture, Bounds, DesignVector, Lengths};
use ppm_core::performance::{characteristic_length, inverse_condition, DexterityConfig};

fn main() {
    for architecture in Architecture::ALL {
        let design = DesignVector {
            architecture,
            lengths: Lengths::from_array([1.412, 0.319, 0.620, 0.026, 0.023]),
        };
        let mech = Mechanism::new(&validate(&design, &Bounds::default()).expect("within bounds"));
        let mode = WorkingMode::default();
        let Ok(lc) = characteristic_length(&mech, &mode, &DexterityConfig::default()) else {
            println!("{architecture}: home pose unreachable");
            continue;
        };
        print!("{architecture}: L_c = {lc:.4} m, κ⁻¹ at φ =");
        for deg in [-10.0, -5.0, 0.0, 5.0, 10.0f64] {
            let pose = Pose::new(0.0, 0.0, deg.to_radians());
            match mech.solve_legs(&pose, &mode) {
                Ok(legs) => print!(" {deg}°: {:.3}", inverse_condition(&mech.jacobian(&pose, &legs), lc)),
                Err(_) => print!(" {deg}°: unreachable"),
            }
        }
        println!();
    }
}
