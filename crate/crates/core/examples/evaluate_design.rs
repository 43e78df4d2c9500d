//! Full evaluation report of one design through the CLI layer.

use ppm_core::cli::{cmd_evaluate, parse_design, CliError};
use ppm_core::config::RunConfig;

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "PRR,1.412,0.319,0.620,0.026,0.023".to_owned());
    let design = parse_design(&text).expect("d,R,r,L_b,r_j,r_p");
    let cfg = RunConfig {
        output_dir: std::env::temp_dir().join("ppm-evaluate"),
        ..RunConfig::default()
    };
    match cmd_evaluate(&cfg, &design) {
        Ok(out) => print!("{}", out.text),
        Err(CliError::Infeasible(path)) => {
            print!("{}", std::fs::read_to_string(&path).unwrap_or_default());
            println!("infeasible, report at {}", path.display());
        }
        Err(e) => eprintln!("{e}"),
    }
}
