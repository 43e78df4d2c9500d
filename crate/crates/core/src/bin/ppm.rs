use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ppm_core::cli::{self, CliError};
use ppm_core::config::RunConfig;

#[derive(Parser)]
#[command(name = "ppm", version, about = "Planar parallel manipulator design evaluation and optimization")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optimizer seed, overriding `moga.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation threads (0 = all cores), overriding `threads`.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one design and write evaluation.txt.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// d,R,r,L_b,r_j,r_p
        #[arg(long, allow_hyphen_values = true)]
        design: String,
    },
    /// Run the optimizer and write pareto.csv, history.csv and fronts_by_architecture.csv.
    Optimize {
        #[command(flatten)]
        common: Common,
    },
    /// Extract one architecture's front from an exported CSV as sweep_<ARCH>.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// fronts_by_architecture.csv, pareto.csv or history.csv of a finished run.
        #[arg(long)]
        archive: PathBuf,
        /// PRR, RPR, RRR or 1, 2, 3.
        #[arg(long)]
        architecture: String,
    },
    /// Print the default configuration as TOML.
    PrintDefaults,
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.moga.seed = seed;
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    Ok(cfg)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::PrintDefaults => print!("{}", RunConfig::defaults_toml()),
        Command::Evaluate { common, design } => {
            let cfg = load(&common)?;
            let design = cli::parse_design(&design)?;
            let outcome = cli::cmd_evaluate(&cfg, &design)?;
            print!("{}", outcome.text);
        }
        Command::Optimize { common } => {
            let cfg = load(&common)?;
            let outcome = cli::cmd_optimize(&cfg, |line| eprintln!("{line}"))?;
            eprintln!("archive: {} designs, written to {}", outcome.result.archive.len(), outcome.pareto.display());
        }
        Command::Sweep {
            common,
            archive,
            architecture,
        } => {
            let cfg = load(&common)?;
            let architecture = cli::parse_architecture(&architecture)?;
            let path = cli::cmd_sweep(&cfg, &archive, architecture)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
