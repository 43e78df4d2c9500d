//! Load a TOML run configuration over the defaults and show the derived problem.

use ppm_core::config::RunConfig;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable config"),
        None => "threads = 1\n\n[dexterity]\nthreshold = 0.05\n\n[dexterity.characteristic_length]\npolicy = \"fixed\"\nvalue = 0.5\n".to_owned(),
    };
    let cfg = match RunConfig::from_toml(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let problem = cfg.problem();
    println!("dexterity: {:?}", problem.criteria.dexterity);
    println!("thresholds: {:?}", problem.criteria.thresholds);
    println!("grid: {:?}, {} poses", problem.grid, problem.grid.len());
    println!("optimizer budget: {} evaluations", cfg.moga.budget());
}
