//! Evolutionary many-objective path solvers: a generational mu+lambda loop
//! over variable-length path genomes with intersection crossover, perimeter
//! mutation and NSGA-II or NSGA-III (reference-direction) environmental
//! selection.

mod operators;
mod selection;

pub use operators::{crossover, perimeter_mutation, random_path, repair_loops};
pub use selection::{
    binary_tournament, nsga2_select, nsga3_select, rank_population, reference_directions,
    RankedPopulation,
};

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{RoutingGraph, SpatialIndex};
use crate::metrics::dplus;
use crate::objectives::{self, PathGenome};
use crate::pareto::ParetoArchive;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("end node is not reachable from the start node")]
    Unreachable,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Which environmental selection the solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Nsga2,
    Nsga3,
}

impl Selection {
    pub fn name(self) -> &'static str {
        match self {
            Selection::Nsga2 => "nsga2",
            Selection::Nsga3 => "nsga3",
        }
    }
}

/// Solver configuration; the JSON run-configuration document mirrors these
/// fields exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgoConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub generations: usize,
    pub selection: Selection,
    /// Simplex divisions for the NSGA-III reference directions.
    pub divisions_p: usize,
    pub rng_seed: u64,
    /// Radius of the perimeter mutation's spatial query; `None` picks
    /// `max(2, (size_x + size_y) / 8)` lattice units from the graph extent.
    pub mutation_r_max: Option<f64>,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            population_size: 212,
            crossover_prob: 0.8,
            mutation_prob: 0.2,
            generations: 500,
            selection: Selection::Nsga2,
            divisions_p: 6,
            rng_seed: 1,
            mutation_r_max: None,
        }
    }
}

impl AlgoConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let fail = |m: &str| Err(EvolveError::InvalidConfig(m.into()));
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return fail("population_size must be even and at least 4");
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return fail("crossover_prob must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return fail("mutation_prob must lie in [0, 1]");
        }
        if self.selection == Selection::Nsga3 && self.divisions_p < 1 {
            return fail("divisions_p must be at least 1");
        }
        if let Some(r) = self.mutation_r_max {
            if !r.is_finite() || r < 0.0 {
                return fail("mutation_r_max must be finite and non-negative");
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, EvolveError> {
        let config: AlgoConfig = serde_json::from_str(text)
            .map_err(|e| EvolveError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn resolved_r_max(&self, graph: &RoutingGraph) -> f64 {
        self.mutation_r_max.unwrap_or_else(|| {
            let (mut max_x, mut max_y) = (0.0f64, 0.0f64);
            let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
            for n in graph.nodes() {
                max_x = max_x.max(n.x);
                max_y = max_y.max(n.y);
                min_x = min_x.min(n.x);
                min_y = min_y.min(n.y);
            }
            let extent = (max_x - min_x + 1.0) + (max_y - min_y + 1.0);
            (extent / 8.0).max(2.0)
        })
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Non-dominated subset of the final population.
    pub final_nondominated: ParetoArchive<PathGenome>,
    /// Non-dominated set over every genome evaluated during the run.
    pub best_archive: ParetoArchive<PathGenome>,
    /// Best-archive IGD+ after initialization and after each generation;
    /// empty without a reference front.
    pub igd_plus_history: Vec<f64>,
    pub evaluations: u64,
}

/// Tracks, per reference point, the smallest positive-excess distance seen
/// so far; the mean is exactly the best-archive IGD+ and can be maintained
/// from archive-accepted points only, because a rejected point is weakly
/// dominated by some accepted one and can therefore never shrink any term.
struct IgdTracker<'a> {
    reference: &'a [Vec<f64>],
    best: Vec<f64>,
}

impl<'a> IgdTracker<'a> {
    fn new(reference: &'a [Vec<f64>]) -> Self {
        IgdTracker { reference, best: vec![f64::INFINITY; reference.len()] }
    }

    fn observe(&mut self, point: &[f64]) {
        for (slot, z) in self.best.iter_mut().zip(self.reference) {
            let d = dplus(z, point);
            if d < *slot {
                *slot = d;
            }
        }
    }

    fn mean(&self) -> f64 {
        self.best.iter().sum::<f64>() / self.best.len() as f64
    }
}

struct Individual {
    genome: PathGenome,
    objectives: Vec<f64>,
}

/// One seeded solver run. With a `reference` front the per-generation
/// best-archive IGD+ is recorded. Deterministic: identical inputs and seed
/// give identical results.
pub fn run(
    graph: &RoutingGraph,
    config: &AlgoConfig,
    reference: Option<&[Vec<f64>]>,
) -> Result<RunResult, EvolveError> {
    config.validate()?;
    if !graph.is_reachable() {
        return Err(EvolveError::Unreachable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let index = SpatialIndex::build(graph);
    let r_max = config.resolved_r_max(graph);
    let directions = match config.selection {
        Selection::Nsga3 => reference_directions(5, config.divisions_p),
        Selection::Nsga2 => Vec::new(),
    };
    let n = config.population_size;

    let mut best_archive: ParetoArchive<PathGenome> = ParetoArchive::new();
    let mut tracker = reference.map(IgdTracker::new);
    let mut seen: HashSet<[u64; 5]> = HashSet::new();
    let mut evaluations = 0u64;
    let mut history = Vec::new();

    let mut record = |genome: &PathGenome,
                      best_archive: &mut ParetoArchive<PathGenome>,
                      tracker: &mut Option<IgdTracker>,
                      evaluations: &mut u64,
                      seen: &mut HashSet<[u64; 5]>|
     -> Vec<f64> {
        let objectives = objectives::evaluate(genome, graph).to_vec();
        *evaluations += 1;
        let key: [u64; 5] = std::array::from_fn(|i| objectives[i].to_bits());
        // duplicates of an already-seen vector can change neither the
        // archive nor the IGD+ terms
        if seen.insert(key) && best_archive.insert(objectives.clone(), genome.clone()) {
            if let Some(t) = tracker.as_mut() {
                t.observe(&objectives);
            }
        }
        objectives
    };

    let mut population: Vec<Individual> = Vec::with_capacity(n);
    for _ in 0..n {
        let genome = random_path(graph, &mut rng).ok_or(EvolveError::Unreachable)?;
        let objectives =
            record(&genome, &mut best_archive, &mut tracker, &mut evaluations, &mut seen);
        population.push(Individual { genome, objectives });
    }
    if let Some(t) = &tracker {
        history.push(t.mean());
    }

    for _ in 0..config.generations {
        let points: Vec<Vec<f64>> = population.iter().map(|i| i.objectives.clone()).collect();
        let ranked = rank_population(&points);

        let mut offspring: Vec<Individual> = Vec::with_capacity(n);
        while offspring.len() < n {
            let a = binary_tournament(&ranked, &mut rng);
            let b = binary_tournament(&ranked, &mut rng);
            let (mut c1, mut c2) = if rng.random_bool(config.crossover_prob) {
                crossover(&population[a].genome, &population[b].genome, graph, &mut rng)
            } else {
                (population[a].genome.clone(), population[b].genome.clone())
            };
            if rng.random_bool(config.mutation_prob) {
                c1 = perimeter_mutation(&c1, graph, &index, &mut rng, r_max);
            }
            if rng.random_bool(config.mutation_prob) {
                c2 = perimeter_mutation(&c2, graph, &index, &mut rng, r_max);
            }
            for child in [c1, c2] {
                if offspring.len() == n {
                    break;
                }
                let objectives =
                    record(&child, &mut best_archive, &mut tracker, &mut evaluations, &mut seen);
                offspring.push(Individual { genome: child, objectives });
            }
        }

        population.extend(offspring);
        let combined: Vec<Vec<f64>> = population.iter().map(|i| i.objectives.clone()).collect();
        let chosen = match config.selection {
            Selection::Nsga2 => nsga2_select(&combined, n),
            Selection::Nsga3 => nsga3_select(&combined, n, &directions, &mut rng),
        };
        let mut keep: Vec<Option<Individual>> = population.into_iter().map(Some).collect();
        population = chosen
            .into_iter()
            .map(|i| keep[i].take().expect("selection picks distinct indices"))
            .collect();
        if let Some(t) = &tracker {
            history.push(t.mean());
        }
    }

    let mut final_nondominated = ParetoArchive::new();
    for individual in &population {
        final_nondominated.insert(individual.objectives.clone(), individual.genome.clone());
    }
    Ok(RunResult {
        final_nondominated,
        best_archive,
        igd_plus_history: history,
        evaluations,
    })
}

/// Runs every configuration `runs` times with seeds `rng_seed + run index`
/// and returns the per-run final best-archive IGD+ values, one list per
/// configuration. Runs execute in parallel; results are ordered and
/// deterministic.
pub fn experiment(
    graph: &RoutingGraph,
    configs: &[AlgoConfig],
    runs: usize,
    reference: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, EvolveError> {
    use rayon::prelude::*;

    for config in configs {
        config.validate()?;
    }
    let jobs: Vec<(usize, u64)> = configs
        .iter()
        .enumerate()
        .flat_map(|(c, config)| {
            (0..runs as u64).map(move |r| (c, config.rng_seed.wrapping_add(r)))
        })
        .collect();
    let outcomes: Vec<Result<f64, EvolveError>> = jobs
        .par_iter()
        .map(|&(c, seed)| {
            let config = AlgoConfig { rng_seed: seed, ..configs[c].clone() };
            let result = run(graph, &config, Some(reference))?;
            Ok(*result
                .igd_plus_history
                .last()
                .expect("history is non-empty when a reference is supplied"))
        })
        .collect();
    let mut per_config = vec![Vec::with_capacity(runs); configs.len()];
    for ((c, _), outcome) in jobs.into_iter().zip(outcomes) {
        per_config[c].push(outcome?);
    }
    Ok(per_config)
}
