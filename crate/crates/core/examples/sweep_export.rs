//! Optimize, export the CSV files, then extract the 3-PRR design-variable sweep.

use ppm_core::cli::{cmd_optimize, cmd_sweep};
use ppm_core::config::RunConfig;
use ppm_core::model::Architecture;

fn main() {
    let mut cfg = RunConfig {
        output_dir: std::env::temp_dir().join("ppm-sweep"),
        ..RunConfig::default()
    };
    cfg.moga.population = 30;
    cfg.moga.generations = 8;
    let out = cmd_optimize(&cfg, |line| eprintln!("{line}")).expect("feasible designs found");
    println!("wrote {}, {}, {}", out.pareto.display(), out.history.display(), out.fronts.display());
    match cmd_sweep(&cfg, &out.fronts, Architecture::Prr) {
        Ok(path) => print!("{}", std::fs::read_to_string(path).expect("sweep written")),
        Err(e) => eprintln!("{e}"),
    }
}
