//! The generational loop: DOE, operator roulette, elitist selection, archive.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::evaluate::{Evaluation, Problem};
use super::genome::{Genome, GENOME_BITS};
use super::pareto::{crowding_distances, hypervolume, nondominated_ranks, pareto_filter};
use super::sobol::Sobol;
use crate::model::Architecture;

/// Mass of the hypervolume reference point, kg (its R_w is 0).
pub const HYPERVOLUME_MASS_REF: f64 = 5000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Doe {
    Sobol,
    Latin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MogaConfig {
    pub population: usize,
    /// Generation 0 is the DOE, so the budget is `population × generations` evaluations.
    pub generations: usize,
    pub p_directional_crossover: f64,
    /// Probability of copying a tournament winner unchanged.
    pub p_selection: f64,
    pub p_mutation: f64,
    /// Per-bit flip probability of a mutation.
    pub dna_mutation_ratio: f64,
    pub seed: u64,
    pub doe: Doe,
}

impl Default for MogaConfig {
    fn default() -> Self {
        MogaConfig {
            population: 30,
            generations: 200,
            p_directional_crossover: 0.5,
            p_selection: 0.05,
            p_mutation: 0.1,
            dna_mutation_ratio: 0.05,
            seed: 1,
            doe: Doe::Sobol,
        }
    }
}

impl MogaConfig {
    /// Probability left for one-point crossover.
    pub fn p_one_point_crossover(&self) -> f64 {
        1.0 - self.p_directional_crossover - self.p_selection - self.p_mutation
    }

    pub fn budget(&self) -> usize {
        self.population * self.generations
    }

    pub fn check(&self) -> Result<(), MogaError> {
        let probabilities = [
            ("p_directional_crossover", self.p_directional_crossover),
            ("p_selection", self.p_selection),
            ("p_mutation", self.p_mutation),
            ("dna_mutation_ratio", self.dna_mutation_ratio),
        ];
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(MogaError::InvalidConfig(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        if self.p_one_point_crossover() < -1e-12 {
            return Err(MogaError::InvalidConfig("operator probabilities sum above 1".into()));
        }
        if self.population < 2 {
            return Err(MogaError::InvalidConfig("population must be at least 2".into()));
        }
        if self.generations < 1 {
            return Err(MogaError::InvalidConfig("generations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MogaError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("no feasible design found within the evaluation budget")]
    NoFeasibleDesign,
}

/// Mutually non-dominated feasible evaluations, sorted by R_w ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParetoArchive {
    pub entries: Vec<Evaluation>,
}

impl ParetoArchive {
    /// Front of the feasible members of `evaluations`.
    pub fn from_evaluations<'a, I: IntoIterator<Item = &'a Evaluation>>(evaluations: I) -> Self {
        let feasible: Vec<Evaluation> = evaluations.into_iter().filter(|e| e.feasible).cloned().collect();
        ParetoArchive {
            entries: pareto_filter(&feasible),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hypervolume(&self) -> f64 {
        hypervolume(&self.entries, HYPERVOLUME_MASS_REF)
    }

    /// Share of entries with the given architecture; 0 for an empty archive.
    pub fn share(&self, architecture: Architecture) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let n = self.entries.iter().filter(|e| e.design.architecture == architecture).count();
        n as f64 / self.len() as f64
    }
}

/// One row of the evaluation log.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedEvaluation {
    pub generation: usize,
    pub genome: Genome,
    pub evaluation: Evaluation,
}

/// Archive statistics after a generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub hypervolume: f64,
    /// Feasible designs among this generation's evaluations.
    pub n_feasible: usize,
    pub archive_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MogaResult {
    pub archive: ParetoArchive,
    pub generations: Vec<GenerationRecord>,
    /// Every evaluation slot in order, duplicates included.
    pub log: Vec<LoggedEvaluation>,
}

impl MogaResult {
    pub fn require_feasible(&self) -> Result<&ParetoArchive, MogaError> {
        if self.archive.is_empty() {
            Err(MogaError::NoFeasibleDesign)
        } else {
            Ok(&self.archive)
        }
    }

    pub fn evaluations(&self) -> impl Iterator<Item = &Evaluation> {
        self.log.iter().map(|l| &l.evaluation)
    }
}

/// Initial designs: Sobol (shifted by the seed) or Latin hypercube on the continuous genes,
/// architectures assigned round-robin.
pub fn initial_population(n: usize, doe: Doe, seed: u64) -> Vec<Genome> {
    let unit: Vec<[f64; 5]> = match doe {
        Doe::Sobol => {
            let mut s = Sobol::shifted(5, seed);
            (0..n).map(|_| s.next_point().try_into().expect("five dimensions")).collect()
        }
        Doe::Latin => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cols = [(); 5].map(|_| (0..n).collect::<Vec<usize>>());
            for c in cols.iter_mut() {
                c.shuffle(&mut rng);
            }
            (0..n)
                .map(|i| std::array::from_fn(|d| (cols[d][i] as f64 + rng.random::<f64>()) / n as f64))
                .collect()
        }
    };
    unit.iter()
        .enumerate()
        .map(|(i, u)| {
            let levels = u.map(|x| (x * 65535.0).round().clamp(0.0, 65535.0) as u16);
            Genome::from_levels((i % 3) as u8, levels)
        })
        .collect()
}

/// Sobol DOE mapped to genomes.
pub fn sobol_doe(n: usize, seed: u64) -> Vec<Genome> {
    initial_population(n, Doe::Sobol, seed)
}

#[derive(Debug, Clone, Copy)]
struct Member {
    genome: Genome,
    eval: usize,
}

struct Fitness {
    feasible: bool,
    violation: f64,
    rank: usize,
    crowding: f64,
}

fn better(a: &Fitness, b: &Fitness) -> Ordering {
    match (a.feasible, b.feasible) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.violation.total_cmp(&b.violation),
        (true, true) => a.rank.cmp(&b.rank).then(b.crowding.total_cmp(&a.crowding)),
    }
}

fn fitness(members: &[Member], evals: &[Evaluation]) -> Vec<Fitness> {
    let feasible: Vec<usize> = (0..members.len()).filter(|&i| evals[members[i].eval].feasible).collect();
    let objs: Vec<Evaluation> = feasible.iter().map(|&i| evals[members[i].eval].clone()).collect();
    let ranks = nondominated_ranks(&objs);
    let mut crowd = vec![0.0; objs.len()];
    for level in 0..=ranks.iter().copied().max().unwrap_or(0) {
        let front: Vec<usize> = (0..objs.len()).filter(|&k| ranks[k] == level).collect();
        for (k, d) in front.iter().zip(crowding_distances(&objs, &front)) {
            crowd[*k] = d;
        }
    }
    let mut out: Vec<Fitness> = members
        .iter()
        .map(|m| Fitness {
            feasible: false,
            violation: evals[m.eval].violation,
            rank: usize::MAX,
            crowding: 0.0,
        })
        .collect();
    for (k, &i) in feasible.iter().enumerate() {
        out[i].feasible = true;
        out[i].rank = ranks[k];
        out[i].crowding = crowd[k];
    }
    out
}

fn tournament(rng: &mut ChaCha8Rng, fit: &[Fitness]) -> usize {
    let a = rng.random_range(0..fit.len());
    let b = rng.random_range(0..fit.len());
    if better(&fit[b], &fit[a]) == Ordering::Less {
        b
    } else {
        a
    }
}

/// `(better, worse)` lattice difference between two members.
fn direction(i: usize, j: usize, pop: &[Member], fit: &[Fitness]) -> [f64; 5] {
    let (hi, lo) = if better(&fit[j], &fit[i]) == Ordering::Less { (j, i) } else { (i, j) };
    let a = pop[hi].genome.levels();
    let b = pop[lo].genome.levels();
    std::array::from_fn(|d| f64::from(a[d]) - f64::from(b[d]))
}

fn offspring(rng: &mut ChaCha8Rng, cfg: &MogaConfig, pop: &[Member], fit: &[Fitness]) -> Genome {
    let roll: f64 = rng.random();
    let p = tournament(rng, fit);
    let parent = pop[p].genome;
    if roll < cfg.p_directional_crossover {
        let j = rng.random_range(0..pop.len());
        let k = rng.random_range(0..pop.len());
        let l = rng.random_range(0..pop.len());
        let d1 = direction(p, j, pop, fit);
        let d2 = direction(k, l, pop, fit);
        let (s, t): (f64, f64) = (rng.random(), rng.random());
        let base = parent.levels();
        let levels = std::array::from_fn(|d| (f64::from(base[d]) + s * d1[d] + t * d2[d]).round().clamp(0.0, 65535.0) as u16);
        Genome::from_levels(parent.architecture, levels)
    } else if roll < cfg.p_directional_crossover + cfg.p_selection {
        parent
    } else if roll < cfg.p_directional_crossover + cfg.p_selection + cfg.p_mutation {
        let mut child = parent;
        for bit in 0..GENOME_BITS {
            if rng.random::<f64>() < cfg.dna_mutation_ratio {
                child.flip(bit);
            }
        }
        child
    } else {
        let other = pop[tournament(rng, fit)].genome;
        let cut = rng.random_range(1..GENOME_BITS);
        parent.splice(&other, cut)
    }
}

/// Evaluates the genomes missing from the cache in parallel, in input order.
fn evaluate_all(problem: &Problem, genomes: &[Genome], cache: &mut HashMap<Genome, usize>, evals: &mut Vec<Evaluation>) -> Vec<usize> {
    let mut fresh: Vec<Genome> = Vec::new();
    for g in genomes {
        if !cache.contains_key(g) && !fresh.contains(g) {
            fresh.push(*g);
        }
    }
    let results: Vec<Evaluation> = fresh.par_iter().map(|g| problem.evaluate(&g.decode(&problem.bounds))).collect();
    for (g, e) in fresh.into_iter().zip(results) {
        cache.insert(g, evals.len());
        evals.push(e);
    }
    genomes.iter().map(|g| cache[g]).collect()
}

/// Keeps the best `n` of `pool` by feasibility, rank and crowding; repeated genomes go last.
fn environmental_selection(pool: Vec<Member>, evals: &[Evaluation], n: usize) -> Vec<Member> {
    let mut unique: Vec<Member> = Vec::new();
    let mut repeats: Vec<Member> = Vec::new();
    for m in pool {
        if unique.iter().any(|u| u.genome == m.genome) {
            repeats.push(m);
        } else {
            unique.push(m);
        }
    }
    let fit = fitness(&unique, evals);
    let mut order: Vec<usize> = (0..unique.len()).collect();
    order.sort_by(|&a, &b| better(&fit[a], &fit[b]).then(a.cmp(&b)));
    let mut out: Vec<Member> = order.into_iter().map(|i| unique[i]).collect();
    out.extend(repeats);
    out.truncate(n);
    out
}

/// Runs the optimizer; evaluation uses the current rayon pool, all random draws are sequential.
pub fn evolve(problem: &Problem, cfg: &MogaConfig) -> Result<MogaResult, MogaError> {
    evolve_with(problem, cfg, |_| {})
}

/// As [`evolve`], calling `observer` after each generation.
pub fn evolve_with<F: FnMut(&GenerationRecord)>(problem: &Problem, cfg: &MogaConfig, mut observer: F) -> Result<MogaResult, MogaError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cache: HashMap<Genome, usize> = HashMap::new();
    let mut evals: Vec<Evaluation> = Vec::new();
    let mut log = Vec::with_capacity(cfg.budget());
    let mut records = Vec::with_capacity(cfg.generations);
    let mut archive = ParetoArchive::default();

    let mut population: Vec<Member> = Vec::new();
    for generation in 0..cfg.generations {
        let genomes = if generation == 0 {
            initial_population(cfg.population, cfg.doe, cfg.seed)
        } else {
            let fit = fitness(&population, &evals);
            (0..cfg.population).map(|_| offspring(&mut rng, cfg, &population, &fit)).collect()
        };
        let ids = evaluate_all(problem, &genomes, &mut cache, &mut evals);
        let children: Vec<Member> = genomes.iter().zip(&ids).map(|(&genome, &eval)| Member { genome, eval }).collect();
        for c in &children {
            log.push(LoggedEvaluation {
                generation,
                genome: c.genome,
                evaluation: evals[c.eval].clone(),
            });
        }
        archive = ParetoArchive::from_evaluations(archive.entries.iter().chain(children.iter().map(|c| &evals[c.eval])));
        let mut pool = population;
        pool.extend(children.iter().copied());
        population = environmental_selection(pool, &evals, cfg.population);
        let record = GenerationRecord {
            generation,
            hypervolume: archive.hypervolume(),
            n_feasible: children.iter().filter(|c| evals[c.eval].feasible).count(),
            archive_size: archive.len(),
        };
        observer(&record);
        records.push(record);
    }
    Ok(MogaResult {
        archive,
        generations: records,
        log,
    })
}

/// Fronts of the feasible evaluations of each architecture, in PRR, RPR, RRR order.
pub fn per_architecture_fronts<'a, I: IntoIterator<Item = &'a Evaluation>>(evaluations: I) -> [ParetoArchive; 3] {
    let all: Vec<&Evaluation> = evaluations.into_iter().collect();
    Architecture::ALL.map(|a| ParetoArchive::from_evaluations(all.iter().copied().filter(|e| e.design.architecture == a)))
}
