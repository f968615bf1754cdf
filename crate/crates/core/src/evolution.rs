//! Generational loop under a fixed evaluation budget.
//!
//! One generation costs `population_size * total_cases` evaluations, the
//! number of times parent selection may consult a test case. Offspring
//! replace the whole population each generation; there is no elitism and
//! no crossover.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{build_case_map, DiagnosticKind, TestCaseMap};
use crate::error::{Error, Result};
use crate::genome::{random_genotype, Genotype, Population};
use crate::metrics::{self, GenerationRecord};
use crate::rng::RandomSource;
use crate::selection::Selector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    /// Probability that any one gene receives a point mutation.
    pub per_gene_rate: f64,
    pub gaussian_mean: f64,
    pub gaussian_sd: f64,
    /// Genes above this value rebound below it; negative genes take their
    /// absolute value.
    pub upper_threshold: f64,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            per_gene_rate: 0.0007,
            gaussian_mean: 0.0,
            gaussian_sd: 1.0,
            upper_threshold: 100.0,
        }
    }
}

impl MutationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.per_gene_rate) {
            return Err(Error::InvalidConfig(format!(
                "mutation.per_gene_rate must lie in [0, 1], got {}",
                self.per_gene_rate
            )));
        }
        if !self.gaussian_sd.is_finite() || self.gaussian_sd <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mutation.gaussian_sd must be positive, got {}",
                self.gaussian_sd
            )));
        }
        if !self.upper_threshold.is_finite() || self.upper_threshold <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mutation.upper_threshold must be positive, got {}",
                self.upper_threshold
            )));
        }
        if !self.gaussian_mean.is_finite() {
            return Err(Error::InvalidConfig("mutation.gaussian_mean must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub diagnostic: DiagnosticKind,
    pub dim: usize,
    pub population_size: usize,
    pub redundant_cases: usize,
    pub evaluation_budget: u64,
    pub mutation: MutationConfig,
    pub seed: u64,
    /// Output down-sampling stride in evaluations; 0 keeps every generation.
    pub snapshot_stride_evals: u64,
}

impl RunConfig {
    pub fn total_cases(&self) -> usize {
        self.dim + self.redundant_cases
    }

    pub fn evals_per_generation(&self) -> u64 {
        self.population_size as u64 * self.total_cases() as u64
    }

    pub fn generations(&self) -> Result<u64> {
        generations_for_budget(self.evaluation_budget, self.population_size, self.total_cases())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if self.population_size == 0 {
            return Err(Error::InvalidConfig("population size must be at least 1".into()));
        }
        if self.redundant_cases > 0 && self.diagnostic != DiagnosticKind::ContradictoryObjectives {
            return Err(Error::InvalidConfig(
                "redundant test cases are only defined for the contradictory objectives diagnostic".into(),
            ));
        }
        if self.evaluation_budget < self.evals_per_generation() {
            return Err(Error::InvalidConfig(format!(
                "evaluation budget {} is smaller than one generation ({} individuals x {} cases = {})",
                self.evaluation_budget,
                self.population_size,
                self.total_cases(),
                self.evals_per_generation()
            )));
        }
        self.mutation.validate()
    }
}

/// Whole generations affordable with `budget` evaluations.
pub fn generations_for_budget(budget: u64, population_size: usize, total_cases: usize) -> Result<u64> {
    if population_size == 0 || total_cases == 0 {
        return Err(Error::InvalidConfig(
            "population size and case count must both be at least 1".into(),
        ));
    }
    Ok(budget / (population_size as u64 * total_cases as u64))
}

/// Fold a perturbed gene back into `[0, upper]`: negative values take their
/// absolute value, values above `upper` rebound by their excess.
pub fn fold_into_bounds(mut value: f64, upper: f64) -> f64 {
    loop {
        if value < 0.0 {
            value = -value;
        } else if value > upper {
            value = upper - (value - upper);
        } else {
            return value;
        }
    }
}

/// Point-mutate each gene independently with probability `per_gene_rate`.
pub fn mutate(genotype: &Genotype, cfg: &MutationConfig, rng: &mut RandomSource) -> Genotype {
    let mut child = genotype.clone();
    mutate_in_place(&mut child, cfg, rng);
    child
}

pub(crate) fn mutate_in_place(genotype: &mut Genotype, cfg: &MutationConfig, rng: &mut RandomSource) {
    for gene in genotype.genes_mut() {
        if rng.chance(cfg.per_gene_rate) {
            let perturbed = *gene + rng.gaussian(cfg.gaussian_mean, cfg.gaussian_sd);
            *gene = fold_into_bounds(perturbed, cfg.upper_threshold);
        }
    }
}

/// Consumer of per-generation records.
pub trait RecordSink {
    fn record(&mut self, rec: &GenerationRecord) -> Result<()>;

    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl RecordSink for Vec<GenerationRecord> {
    fn record(&mut self, rec: &GenerationRecord) -> Result<()> {
        self.push(rec.clone());
        Ok(())
    }
}

/// Discards everything.
#[derive(Debug, Default)]
pub struct NullSink;

impl RecordSink for NullSink {
    fn record(&mut self, _: &GenerationRecord) -> Result<()> {
        Ok(())
    }
}

/// Forwards generation 0, then for every stride boundary the last record at
/// or below it, then the final record.
///
/// A stride of 0 forwards every record.
#[derive(Debug)]
pub struct StridedSink<S> {
    inner: S,
    stride: u64,
    pending: Option<GenerationRecord>,
}

impl<S: RecordSink> StridedSink<S> {
    pub fn new(inner: S, stride: u64) -> Self {
        Self {
            inner,
            stride,
            pending: None,
        }
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: RecordSink> RecordSink for StridedSink<S> {
    fn record(&mut self, rec: &GenerationRecord) -> Result<()> {
        if self.stride == 0 || rec.generation == 0 {
            return self.inner.record(rec);
        }
        if let Some(prev) = self.pending.take() {
            // `prev` is the last record at or below some multiple of the stride.
            if prev.cumulative_evaluations.div_ceil(self.stride) * self.stride < rec.cumulative_evaluations {
                self.inner.record(&prev)?;
            }
        }
        self.pending = Some(rec.clone());
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if let Some(last) = self.pending.take() {
            self.inner.record(&last)?;
        }
        self.inner.finish()
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub generations: u64,
    pub evals_per_generation: u64,
    pub total_evaluations: u64,
    pub final_record: GenerationRecord,
    pub best_so_far: f64,
    /// Largest satisfactory trait coverage seen in any generation.
    pub best_satisfactory_coverage: usize,
    pub first_satisfaction_evals: Option<u64>,
    pub case_map: TestCaseMap,
    pub final_population: Population,
}

struct Tracker {
    evals_per_generation: u64,
    best_so_far: f64,
    best_satisfactory_coverage: usize,
    first_satisfaction: Option<u64>,
}

impl Tracker {
    fn snapshot(&mut self, generation: u64, pop: &Population) -> GenerationRecord {
        let best = metrics::best_performance(pop);
        self.best_so_far = self.best_so_far.max(best);
        let satisfactory = metrics::satisfactory_trait_coverage(pop);
        self.best_satisfactory_coverage = self.best_satisfactory_coverage.max(satisfactory);
        if self.first_satisfaction.is_none() && metrics::any_satisfactory(pop) {
            self.first_satisfaction = Some(metrics::satisfaction_charge(generation, self.evals_per_generation));
        }
        GenerationRecord {
            generation,
            cumulative_evaluations: generation * self.evals_per_generation,
            best_performance: best,
            best_so_far: self.best_so_far,
            activation_gene_coverage: metrics::activation_gene_coverage(pop).ok(),
            satisfactory_trait_coverage: satisfactory,
            first_satisfaction_evals: self.first_satisfaction,
        }
    }
}

/// Execute one replicate.
///
/// The random source is consumed in a fixed order: case map, initial
/// genotypes, then per generation every selection event followed by the
/// offspring mutations in parent order.
pub fn run<S: RecordSink + ?Sized>(cfg: &RunConfig, sink: &mut S) -> Result<RunResult> {
    cfg.validate()?;
    let generations = cfg.generations()?;
    let mut rng = RandomSource::new(cfg.seed);

    let case_map = build_case_map(cfg.dim, cfg.redundant_cases, &mut rng)?;
    let mut pop: Population = (0..cfg.population_size)
        .map(|_| random_genotype(cfg.dim, &mut rng).map(|g| cfg.diagnostic.evaluate(g)))
        .collect::<Result<_>>()?;

    let mut tracker = Tracker {
        evals_per_generation: cfg.evals_per_generation(),
        best_so_far: f64::NEG_INFINITY,
        best_satisfactory_coverage: 0,
        first_satisfaction: None,
    };
    let mut selector = Selector::new();

    for generation in 0..generations {
        sink.record(&tracker.snapshot(generation, &pop))?;
        let parents = selector.select_parents(&pop, &case_map, cfg.population_size, &mut rng)?;
        pop = parents
            .into_iter()
            .map(|p| {
                let mut child = pop[p].genotype.clone();
                mutate_in_place(&mut child, &cfg.mutation, &mut rng);
                cfg.diagnostic.evaluate(child)
            })
            .collect();
    }
    let final_record = tracker.snapshot(generations, &pop);
    sink.record(&final_record)?;
    sink.finish()?;

    Ok(RunResult {
        generations,
        evals_per_generation: cfg.evals_per_generation(),
        total_evaluations: generations * cfg.evals_per_generation(),
        final_record,
        best_so_far: tracker.best_so_far,
        best_satisfactory_coverage: tracker.best_satisfactory_coverage,
        first_satisfaction_evals: tracker.first_satisfaction,
        case_map,
        final_population: pop,
    })
}
