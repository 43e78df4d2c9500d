//! Batch commands behind the `ppm` binary: evaluation reports, optimization runs, CSV exports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::kinematics::Pose;
use crate::model::{validate, Architecture, DesignVector};
use crate::moga::{evolve_with, per_architecture_fronts, pareto_filter, Evaluation, MogaError, MogaResult, ParetoArchive};
use crate::performance::{ConstraintReport, DesignAnalyzer};
use crate::workspace::grid_points;

pub const PARETO_HEADER: &str = "d,R,r,L_b,r_j,r_p,mass_kg,R_w_m,L_c_m,seed";
pub const HISTORY_HEADER: &str = "d,R,r,L_b,r_j,r_p,mass_kg,R_w_m,L_c_m,seed,generation,hypervolume,n_feasible";
pub const SWEEP_HEADER: &str = "R_w_m,R,r,L_b,r_j,r_p";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid design: {0}")]
    Design(String),
    #[error("design is infeasible; report written to {}", .0.display())]
    Infeasible(PathBuf),
    #[error("the archive is empty after the full budget")]
    EmptyArchive,
    #[error("the {0} front is empty")]
    EmptyFront(Architecture),
    #[error("cannot read archive {path}: {message}")]
    Archive { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Design(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::EmptyArchive => 4,
            CliError::EmptyFront(_) => 5,
            CliError::Archive { .. } | CliError::Io { .. } => 1,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `d,R,r,L_b,r_j,r_p`.
pub fn parse_design(text: &str) -> Result<DesignVector, CliError> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() != 6 {
        return Err(CliError::Design(format!("expected d,R,r,L_b,r_j,r_p, got {text:?}")));
    }
    let architecture = parse_architecture(fields[0])?;
    let mut x = [0.0; 5];
    for (slot, f) in x.iter_mut().zip(&fields[1..]) {
        *slot = f.parse().map_err(|_| CliError::Design(format!("not a number: {f:?}")))?;
    }
    Ok(DesignVector {
        architecture,
        lengths: crate::model::Lengths::from_array(x),
    })
}

/// Accepts `1`/`2`/`3` or `PRR`/`RPR`/`RRR` (any case).
pub fn parse_architecture(text: &str) -> Result<Architecture, CliError> {
    let t = text.trim();
    if let Ok(code) = t.parse::<u8>() {
        return Architecture::from_code(code).ok_or_else(|| CliError::Design(format!("unknown architecture code {code}")));
    }
    Architecture::ALL
        .into_iter()
        .find(|a| short_name(*a).eq_ignore_ascii_case(t.trim_start_matches("3-")))
        .ok_or_else(|| CliError::Design(format!("unknown architecture {t:?}")))
}

/// `PRR`, `RPR` or `RRR`.
pub fn short_name(a: Architecture) -> &'static str {
    a.name().trim_start_matches("3-")
}

fn design_fields(d: &DesignVector) -> String {
    let x = d.lengths.to_array();
    format!("{},{},{},{},{},{}", d.architecture.code(), x[0], x[1], x[2], x[3], x[4])
}

fn evaluation_row(e: &Evaluation, seed: u64) -> String {
    format!(
        "{},{},{},{},{}",
        design_fields(&e.design),
        e.mass,
        e.workspace_radius,
        e.characteristic_length.unwrap_or(f64::NAN),
        seed
    )
}

/// `pareto.csv` contents: one row per archive entry, R_w ascending.
pub fn pareto_csv(archive: &ParetoArchive, seed: u64) -> String {
    let mut out = String::from(PARETO_HEADER);
    out.push('\n');
    for e in &archive.entries {
        out.push_str(&evaluation_row(e, seed));
        out.push('\n');
    }
    out
}

/// Same columns as `pareto.csv`, fronts concatenated in PRR, RPR, RRR order.
pub fn fronts_csv(fronts: &[ParetoArchive; 3], seed: u64) -> String {
    let mut out = String::from(PARETO_HEADER);
    out.push('\n');
    for e in fronts.iter().flat_map(|f| &f.entries) {
        out.push_str(&evaluation_row(e, seed));
        out.push('\n');
    }
    out
}

/// Every evaluation slot with the archive statistics of its generation.
pub fn history_csv(result: &MogaResult, seed: u64) -> String {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for row in &result.log {
        let g = &result.generations[row.generation];
        let _ = writeln!(out, "{},{},{},{}", evaluation_row(&row.evaluation, seed), g.generation, g.hypervolume, g.n_feasible);
    }
    out
}

/// `sweep` contents for one front.
pub fn sweep_csv(front: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in front {
        let x = r.lengths;
        let _ = writeln!(out, "{},{},{},{},{},{}", r.workspace_radius, x[0], x[1], x[2], x[3], x[4]);
    }
    out
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

/// Pass/fail per row; checks after a failed inverse kinematics were never run.
fn verdicts(report: &ConstraintReport) -> Vec<(&'static str, &'static str)> {
    constraint_rows(report)
        .into_iter()
        .enumerate()
        .map(|(k, (name, ok))| (name, if k >= 2 && !report.ik_reachable { "-" } else { verdict(ok) }))
        .collect()
}

fn constraint_rows(report: &ConstraintReport) -> [(&'static str, bool); 7] {
    [
        ("g1 geometry", report.g1_geometry),
        ("inverse kinematics", report.ik_reachable),
        ("g2 stroke", report.g2_stroke),
        ("g3 dexterity", report.g3_dexterity),
        ("g4 k_xy", report.g4_kxy),
        ("g5 k_z", report.g5_kz),
        ("g6 k_phiz", report.g6_kphiz),
    ]
}

/// Outcome of `evaluate`.
#[derive(Debug, Clone)]
pub struct EvaluateOutcome {
    pub report_path: PathBuf,
    pub evaluation: Evaluation,
    pub text: String,
}

/// Writes `evaluation.txt` under the output directory. Infeasible designs still get a report.
pub fn cmd_evaluate(cfg: &RunConfig, design: &DesignVector) -> Result<EvaluateOutcome, CliError> {
    let problem = cfg.problem();
    let eval = problem.evaluate(design);
    let mut t = String::new();
    let _ = writeln!(t, "design: {}", design_fields(design));
    let _ = writeln!(t, "architecture: {}", design.architecture);
    let _ = writeln!(t, "working_mode: {}", cfg.working_mode);
    let _ = writeln!(t, "mass_kg: {}", eval.mass);
    let _ = writeln!(t, "R_w_m: {}", eval.workspace_radius);
    let _ = writeln!(t, "feasible: {}", eval.feasible);
    match eval.characteristic_length {
        Some(lc) => {
            let _ = writeln!(t, "L_c_m: {lc}");
        }
        None => {
            let _ = writeln!(t, "L_c_m: none");
        }
    }
    if let Some(reason) = &eval.rejection {
        let _ = writeln!(t, "rejected: {reason}");
    }
    let analyzer = validate(design, &cfg.bounds)
        .ok()
        .and_then(|v| DesignAnalyzer::new(&v, &problem.criteria).ok());
    if let Some(an) = &analyzer {
        let home = an.evaluate(&Pose::new(cfg.workspace.center_x, cfg.workspace.center_y, cfg.workspace.center_phi));
        match home.indices {
            Some(idx) => {
                let _ = writeln!(t, "home_k_xy_min_N_per_m: {}", idx.k_xy_min);
                let _ = writeln!(t, "home_k_z_min_N_per_m: {}", idx.k_z_min);
                let _ = writeln!(t, "home_k_phiz_min_Nm_per_rad: {}", idx.k_phiz_min);
            }
            None => {
                let _ = writeln!(t, "home_stiffness: unavailable");
            }
        }
        let grid = grid_points(&cfg.workspace.with_radius(eval.workspace_radius), &cfg.grid);
        let min_k = grid.iter().map(|p| an.evaluate(p).inverse_condition).fold(f64::INFINITY, f64::min);
        let _ = writeln!(t, "min_inverse_condition_over_workspace: {min_k}");
        let _ = writeln!(t, "\nconstraint            home   limiting");
        let limiting = eval.limiting.map(|r| verdicts(&r));
        for (k, (name, at_home)) in verdicts(&home).into_iter().enumerate() {
            let lim = limiting.as_ref().map(|v| v[k].1).unwrap_or("-");
            let _ = writeln!(t, "{name:<22}{at_home:<7}{lim}");
        }
        if let Some(r) = eval.limiting {
            let _ = writeln!(t, "limiting_pose: {} {} {}", r.pose.x, r.pose.y, r.pose.phi);
        }
    }
    let report_path = cfg.output_dir.join("evaluation.txt");
    write_file(&report_path, &t)?;
    if !eval.feasible {
        return Err(CliError::Infeasible(report_path));
    }
    Ok(EvaluateOutcome {
        report_path,
        evaluation: eval,
        text: t,
    })
}

/// Paths written by `optimize`.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub pareto: PathBuf,
    pub history: PathBuf,
    pub fronts: PathBuf,
    pub result: MogaResult,
}

fn run_header(cfg: &RunConfig) -> String {
    let m = &cfg.moga;
    format!(
        "# MOGA reconstruction: directional crossover {}, selection copy {}, mutation {} (per-bit {}), \
one-point crossover {} (remainder); binary tournament on feasibility, rank, crowding; elitist archive.\n\
# population {}, generations {}, budget {}, seed {}, doe {:?}\n",
        m.p_directional_crossover,
        m.p_selection,
        m.p_mutation,
        m.dna_mutation_ratio,
        m.p_one_point_crossover(),
        m.population,
        m.generations,
        m.budget(),
        m.seed,
        m.doe
    )
}

/// Runs the optimizer and writes `pareto.csv`, `history.csv`, `fronts_by_architecture.csv` and `run.txt`.
/// `progress` receives one line per generation.
pub fn cmd_optimize(cfg: &RunConfig, mut progress: impl FnMut(&str) + Send) -> Result<OptimizeOutcome, CliError> {
    cfg.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    let problem = cfg.problem();
    let result = pool
        .install(|| {
            evolve_with(&problem, &cfg.moga, |g| {
                progress(&format!(
                    "generation {} hypervolume {} feasible {} archive {}",
                    g.generation, g.hypervolume, g.n_feasible, g.archive_size
                ))
            })
        })
        .map_err(|e| match e {
            MogaError::InvalidConfig(m) => CliError::Config(ConfigError::Invalid(m)),
            MogaError::NoFeasibleDesign => CliError::EmptyArchive,
        })?;
    let seed = cfg.moga.seed;
    let dir = &cfg.output_dir;
    let out = OptimizeOutcome {
        pareto: dir.join("pareto.csv"),
        history: dir.join("history.csv"),
        fronts: dir.join("fronts_by_architecture.csv"),
        result,
    };
    write_file(&out.history, &history_csv(&out.result, seed))?;
    write_file(&out.fronts, &fronts_csv(&per_architecture_fronts(out.result.evaluations()), seed))?;
    write_file(&out.pareto, &pareto_csv(&out.result.archive, seed))?;
    let mut summary = run_header(cfg);
    let _ = writeln!(summary, "archive_size: {}", out.result.archive.len());
    let _ = writeln!(summary, "hypervolume: {}", out.result.archive.hypervolume());
    for a in Architecture::ALL {
        let _ = writeln!(summary, "share_{}: {}", short_name(a), out.result.archive.share(a));
    }
    write_file(&dir.join("run.txt"), &summary)?;
    if out.result.archive.is_empty() {
        return Err(CliError::EmptyArchive);
    }
    Ok(out)
}

/// A front point as read back from an exported CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub architecture: Architecture,
    pub mass: f64,
    pub workspace_radius: f64,
    pub lengths: [f64; 5],
}

impl crate::moga::Objectives for SweepRow {
    fn mass(&self) -> f64 {
        self.mass
    }

    fn workspace_radius(&self) -> f64 {
        self.workspace_radius
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    d: u8,
    #[serde(rename = "R")]
    big_r: f64,
    r: f64,
    #[serde(rename = "L_b")]
    l_b: f64,
    r_j: f64,
    r_p: f64,
    mass_kg: f64,
    #[serde(rename = "R_w_m")]
    r_w: f64,
}

/// Reads any export with the `pareto.csv` leading columns (pareto, history or fronts file).
pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let err = |message: String| CliError::Archive {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let mut rows = Vec::new();
    for rec in reader.deserialize::<CsvRow>() {
        let r = rec.map_err(|e| err(e.to_string()))?;
        let architecture = Architecture::from_code(r.d).ok_or_else(|| err(format!("unknown architecture code {}", r.d)))?;
        rows.push(SweepRow {
            architecture,
            mass: r.mass_kg,
            workspace_radius: r.r_w,
            lengths: [r.big_r, r.r, r.l_b, r.r_j, r.r_p],
        });
    }
    Ok(rows)
}

/// Front of one architecture from an exported file; rows with R_w = 0 count as infeasible.
pub fn sweep_front(rows: &[SweepRow], architecture: Architecture) -> Vec<SweepRow> {
    let mine: Vec<SweepRow> = rows
        .iter()
        .filter(|r| r.architecture == architecture && r.workspace_radius > 0.0)
        .copied()
        .collect();
    pareto_filter(&mine)
}

/// Writes `sweep_<ARCH>.csv` under the output directory.
pub fn cmd_sweep(cfg: &RunConfig, archive: &Path, architecture: Architecture) -> Result<PathBuf, CliError> {
    let front = sweep_front(&read_rows(archive)?, architecture);
    if front.is_empty() {
        return Err(CliError::EmptyFront(architecture));
    }
    let path = cfg.output_dir.join(format!("sweep_{}.csv", short_name(architecture)));
    write_file(&path, &sweep_csv(&front))?;
    Ok(path)
}
