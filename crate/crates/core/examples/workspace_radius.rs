//! Largest regular workspace of three 3-PRR designs and the constraint that limits each.

use ppm_core::model::{Architecture, DesignVector, Lengths};
use ppm_core::moga::Problem;

fn main() {
    let problem = Problem::default();
    for x in [
        [1.412, 0.319, 0.620, 0.026, 0.023],
        [3.066, 1.283, 1.896, 0.036, 0.056],
        [3.872, 1.947, 1.977, 0.039, 0.096],
    ] {
        let design = DesignVector {
            architecture: Architecture::Prr,
            lengths: Lengths::from_array(x),
        };
        let e = problem.evaluate(&design);
        print!("R = {:.3}: mass {:.1} kg, R_w {:.3} m", x[0], e.mass, e.workspace_radius);
        if let Some(r) = e.limiting {
            let failed: Vec<&str> = [
                ("g1", r.g1_geometry),
                ("ik", r.ik_reachable),
                ("g2", r.g2_stroke),
                ("g3", r.g3_dexterity),
                ("g4", r.g4_kxy),
                ("g5", r.g5_kz),
                ("g6", r.g6_kphiz),
            ]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n)
            .collect();
            print!(", limited by {} at ({:.3}, {:.3}, {:.3})", failed.join("+"), r.pose.x, r.pose.y, r.pose.phi);
        }
        println!();
    }
}
