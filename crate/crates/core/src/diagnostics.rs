//! Genotype to phenotype transforms and the test-case map.
//!
//! All diagnostics are maximization problems: a larger trait is better.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Genotype, Individual, Phenotype};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    /// Phenotype is a copy of the genotype; one smooth gradient to one optimum.
    ExploitationRate,
    /// Only the activation gene (first maximal gene) is expressed.
    ContradictoryObjectives,
}

impl DiagnosticKind {
    pub fn name(self) -> &'static str {
        match self {
            DiagnosticKind::ExploitationRate => "exploitation-rate",
            DiagnosticKind::ContradictoryObjectives => "contradictory-objectives",
        }
    }

    /// Build an evaluated individual from a genotype.
    pub fn evaluate(self, genotype: Genotype) -> Individual {
        match self {
            DiagnosticKind::ExploitationRate => Individual {
                phenotype: transform_exploitation(&genotype),
                genotype,
                activation_gene: None,
            },
            DiagnosticKind::ContradictoryObjectives => {
                let (phenotype, activation) = transform_contradictory(&genotype);
                Individual {
                    genotype,
                    phenotype,
                    activation_gene: Some(activation),
                }
            }
        }
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiagnosticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exploitation-rate" => Ok(DiagnosticKind::ExploitationRate),
            "contradictory-objectives" => Ok(DiagnosticKind::ContradictoryObjectives),
            other => Err(Error::InvalidConfig(format!("unknown diagnostic `{other}`"))),
        }
    }
}

pub fn transform_exploitation(genotype: &Genotype) -> Phenotype {
    Phenotype::new(genotype.genes().to_vec())
}

/// Index of the first gene attaining the maximum value (exact comparison).
pub fn activation_index(genes: &[f64]) -> usize {
    let mut best = 0;
    for (i, &g) in genes.iter().enumerate().skip(1) {
        if g > genes[best] {
            best = i;
        }
    }
    best
}

/// Copies the activation gene into its trait and zeroes every other trait.
pub fn transform_contradictory(genotype: &Genotype) -> (Phenotype, usize) {
    let genes = genotype.genes();
    let mut traits = vec![0.0; genes.len()];
    if genes.is_empty() {
        return (Phenotype::new(traits), 0);
    }
    let active = activation_index(genes);
    traits[active] = genes[active];
    (Phenotype::new(traits), active)
}

/// Mapping from test-case index to trait index.
///
/// The first `base_count` entries are the identity; the redundant tail holds
/// duplicates sampled uniformly with replacement. Fixed for the whole run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCaseMap {
    pub dim: usize,
    pub redundant_count: usize,
    pub case_to_trait: Vec<usize>,
}

impl TestCaseMap {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            redundant_count: 0,
            case_to_trait: (0..dim).collect(),
        }
    }

    /// Arbitrary map, used for hand-built fixtures. Every entry must index a trait.
    pub fn from_cases(dim: usize, case_to_trait: Vec<usize>) -> Result<Self> {
        if let Some(bad) = case_to_trait.iter().find(|&&t| t >= dim) {
            return Err(Error::InvalidInput(format!(
                "case maps to trait {bad}, but dimensionality is {dim}"
            )));
        }
        let redundant_count = case_to_trait.len().saturating_sub(dim);
        Ok(Self {
            dim,
            redundant_count,
            case_to_trait,
        })
    }

    pub fn total_cases(&self) -> usize {
        self.case_to_trait.len()
    }

    pub fn trait_of(&self, case: usize) -> usize {
        self.case_to_trait[case]
    }

    pub fn redundant_tail(&self) -> &[usize] {
        &self.case_to_trait[self.dim.min(self.case_to_trait.len())..]
    }
}

pub fn build_case_map(dim: usize, redundant_count: usize, rng: &mut RandomSource) -> Result<TestCaseMap> {
    if dim == 0 {
        return Err(Error::InvalidConfig("dimensionality must be at least 1".into()));
    }
    let mut case_to_trait: Vec<usize> = (0..dim).collect();
    case_to_trait.extend((0..redundant_count).map(|_| rng.below(dim)));
    Ok(TestCaseMap {
        dim,
        redundant_count,
        case_to_trait,
    })
}

/// Score of `individual` on test case `case`; higher is better.
pub fn case_score(individual: &Individual, case: usize, map: &TestCaseMap) -> Result<f64> {
    let trait_index = *map.case_to_trait.get(case).ok_or_else(|| {
        Error::Contract(format!(
            "case index {case} out of range for {} cases",
            map.total_cases()
        ))
    })?;
    individual
        .phenotype
        .traits()
        .get(trait_index)
        .copied()
        .ok_or_else(|| Error::Contract(format!("phenotype has no trait {trait_index}")))
}
