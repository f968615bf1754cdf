//! Value types shared by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Fixed-length real vector that mutation operates on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genotype(Vec<f64>);

impl Genotype {
    pub fn new(genes: Vec<f64>) -> Self {
        Self(genes)
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn genes_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Trait vector produced by a diagnostic transform. Never mutated directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phenotype(Vec<f64>);

impl Phenotype {
    pub(crate) fn new(traits: Vec<f64>) -> Self {
        Self(traits)
    }

    pub fn traits(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<f64>> for Phenotype {
    fn from(traits: Vec<f64>) -> Self {
        Self(traits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: Genotype,
    pub phenotype: Phenotype,
    /// Set only under the contradictory objectives diagnostic.
    pub activation_gene: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn get(&self, index: usize) -> Option<&Individual> {
        self.members.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Individual> {
        self.members.iter()
    }
}

impl std::ops::Index<usize> for Population {
    type Output = Individual;

    fn index(&self, index: usize) -> &Individual {
        &self.members[index]
    }
}

impl FromIterator<Individual> for Population {
    fn from_iter<I: IntoIterator<Item = Individual>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Genes drawn independently and uniformly from `[0.0, 1.0)`.
pub fn random_genotype(dim: usize, rng: &mut RandomSource) -> Result<Genotype> {
    if dim == 0 {
        return Err(Error::InvalidConfig("dimensionality must be at least 1".into()));
    }
    Ok(Genotype((0..dim).map(|_| rng.uniform(0.0, 1.0)).collect()))
}
