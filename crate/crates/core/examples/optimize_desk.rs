//! A small optimization run with a per-generation log and the resulting front.

use ppm_core::model::Architecture;
use ppm_core::moga::{evolve_with, MogaConfig, Problem};

fn main() {
    let cfg = MogaConfig {
        population: 30,
        generations: 10,
        seed: 7,
        ..MogaConfig::default()
    };
    let result = evolve_with(&Problem::default(), &cfg, |g| {
        println!(
            "generation {:>2}: hypervolume {:.2}, feasible {}, archive {}",
            g.generation, g.hypervolume, g.n_feasible, g.archive_size
        )
    })
    .expect("valid configuration");
    println!("\nd  mass_kg  R_w_m");
    for e in &result.archive.entries {
        println!("{}  {:>8.2}  {:.3}", e.design.architecture.code(), e.mass, e.workspace_radius);
    }
    for a in Architecture::ALL {
        println!("{a}: {:.0}% of the archive", 100.0 * result.archive.share(a));
    }
}
