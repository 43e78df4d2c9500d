//! Constrained multiobjective genetic algorithm over the mixed design space.

mod evaluate;
mod evolve;
pub mod genome;
pub mod pareto;
pub mod sobol;

pub use evaluate::{Evaluation, Problem};
pub use evolve::{
    evolve, evolve_with, initial_population, per_architecture_fronts, sobol_doe, Doe, GenerationRecord,
    LoggedEvaluation, MogaConfig, MogaError, MogaResult, ParetoArchive, HYPERVOLUME_MASS_REF,
};
pub use genome::Genome;
pub use pareto::{dominates, hypervolume, pareto_filter, Objectives};
