//! Small hand-written populations for the selection-probability oracle.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::TestCaseMap;
use crate::error::{Error, Result};
use crate::genome::{Genotype, Individual, Phenotype, Population};
use crate::rng::RandomSource;
use crate::selection::{selection_probabilities_oracle, SelectionEvent, Selector};

/// Phenotypes are given directly; `case_to_trait` defaults to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFixture {
    pub phenotypes: Vec<Vec<f64>>,
    #[serde(default)]
    pub case_to_trait: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub probabilities: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_difference: Option<f64>,
}

impl OracleFixture {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn population(&self) -> Result<Population> {
        let dim = self.phenotypes.first().map_or(0, Vec::len);
        if dim == 0 || self.phenotypes.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidInput(
                "fixture phenotypes must be non-empty and share one length".into(),
            ));
        }
        Ok(self
            .phenotypes
            .iter()
            .map(|p| Individual {
                genotype: Genotype::new(p.clone()),
                phenotype: Phenotype::from(p.clone()),
                activation_gene: None,
            })
            .collect())
    }

    pub fn case_map(&self) -> Result<TestCaseMap> {
        let dim = self.phenotypes.first().map_or(0, Vec::len);
        match &self.case_to_trait {
            None => Ok(TestCaseMap::identity(dim)),
            Some(cases) => TestCaseMap::from_cases(dim, cases.clone()),
        }
    }

    /// Exact probabilities, plus Monte Carlo frequencies when `samples > 0`.
    pub fn evaluate(&self, samples: usize, seed: u64) -> Result<OracleReport> {
        let pop = self.population()?;
        let map = self.case_map()?;
        let probabilities = selection_probabilities_oracle(&pop, &map)?.probs;
        if samples == 0 {
            return Ok(OracleReport {
                probabilities,
                monte_carlo: None,
                max_abs_difference: None,
            });
        }
        let freq = monte_carlo_frequencies(&pop, &map, samples, seed)?;
        let diff = probabilities
            .iter()
            .zip(&freq)
            .map(|(p, f)| (p - f).abs())
            .fold(0.0, f64::max);
        Ok(OracleReport {
            probabilities,
            monte_carlo: Some(freq),
            max_abs_difference: Some(diff),
        })
    }

    pub fn trace(&self, events: usize, seed: u64) -> Result<Vec<SelectionEvent>> {
        let pop = self.population()?;
        let map = self.case_map()?;
        let mut rng = RandomSource::new(seed);
        let mut sel = Selector::new();
        (0..events).map(|_| sel.select_traced(&pop, &map, &mut rng)).collect()
    }
}

/// Empirical selection frequencies over `samples` lexicase events.
pub fn monte_carlo_frequencies(pop: &Population, map: &TestCaseMap, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = RandomSource::new(seed);
    let mut sel = Selector::new();
    let mut counts = vec![0usize; pop.len()];
    for _ in 0..samples {
        counts[sel.select_one(pop, map, &mut rng)?] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / samples as f64).collect())
}
