//! Per-generation measurements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Phenotype, Population};

/// A trait at or above this value is satisfactory.
pub const SATISFACTORY_THRESHOLD: f64 = 99.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    /// `generation * population_size * total_cases`.
    pub cumulative_evaluations: u64,
    pub best_performance: f64,
    pub best_so_far: f64,
    /// Absent unless the contradictory objectives diagnostic is active.
    pub activation_gene_coverage: Option<usize>,
    pub satisfactory_trait_coverage: usize,
    pub first_satisfaction_evals: Option<u64>,
}

/// Mean trait value.
pub fn average_trait_score(p: &Phenotype) -> f64 {
    let traits = p.traits();
    if traits.is_empty() {
        return 0.0;
    }
    traits.iter().sum::<f64>() / traits.len() as f64
}

pub fn is_satisfactory(p: &Phenotype) -> bool {
    p.traits().iter().all(|&t| t >= SATISFACTORY_THRESHOLD)
}

pub fn best_performance(pop: &Population) -> f64 {
    pop.iter()
        .map(|ind| average_trait_score(&ind.phenotype))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Number of distinct activation genes in the population.
pub fn activation_gene_coverage(pop: &Population) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for ind in pop.iter() {
        let a = ind.activation_gene.ok_or_else(|| {
            Error::Contract("activation gene coverage needs the contradictory objectives diagnostic".into())
        })?;
        seen.insert(a);
    }
    Ok(seen.len())
}

/// Number of trait indices that reach the satisfactory threshold in some member.
pub fn satisfactory_trait_coverage(pop: &Population) -> usize {
    let mut seen = BTreeSet::new();
    for ind in pop.iter() {
        for (i, &t) in ind.phenotype.traits().iter().enumerate() {
            if t >= SATISFACTORY_THRESHOLD {
                seen.insert(i);
            }
        }
    }
    seen.len()
}

pub fn any_satisfactory(pop: &Population) -> bool {
    pop.iter().any(|ind| is_satisfactory(&ind.phenotype))
}

/// Evaluations charged when a satisfactory solution shows up in `generation`.
///
/// The initial population's evaluation is charged to the first selection
/// round, so generation 0 reports the cost of one generation.
pub fn satisfaction_charge(generation: u64, evals_per_generation: u64) -> u64 {
    generation.max(1) * evals_per_generation
}

/// Evaluations accumulated at the first snapshot holding a satisfactory individual.
pub fn first_satisfaction<'a, I>(snapshots: I, evals_per_generation: u64) -> Option<u64>
where
    I: IntoIterator<Item = (&'a GenerationRecord, &'a Population)>,
{
    snapshots
        .into_iter()
        .find(|(_, pop)| any_satisfactory(pop))
        .map(|(rec, _)| satisfaction_charge(rec.generation, evals_per_generation))
}
