//! Lexicase parent selection and an exhaustive selection-probability oracle.
//!
//! A selection event shuffles every test case, then walks the shuffle and
//! keeps only the candidates whose score equals the pool maximum on each
//! case. Scores are compared with exact floating-point equality. The walk
//! stops once a single candidate remains or the cases run out; a residual
//! tie is broken uniformly at random.

use std::io::Write;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::diagnostics::TestCaseMap;
use crate::error::{Error, Result};
use crate::genome::Population;
use crate::rng::RandomSource;

/// Largest case count the oracle will enumerate (8! orderings).
pub const ORACLE_MAX_CASES: usize = 8;
pub const ORACLE_MAX_POPULATION: usize = 32;

/// One lexicase event, kept for debugging selection dynamics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionEvent {
    pub shuffle: Vec<usize>,
    /// `(case, pool size after filtering on that case)` for each case consumed.
    pub survivor_trace: Vec<(usize, usize)>,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionProbabilities {
    pub probs: Vec<f64>,
}

impl SelectionProbabilities {
    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn check_ready(pop: &Population, map: &TestCaseMap) -> Result<()> {
    if pop.is_empty() {
        return Err(Error::Contract("cannot select from an empty population".into()));
    }
    if let Some(i) = pop.iter().position(|ind| ind.phenotype.dim() < map.dim) {
        return Err(Error::Contract(format!(
            "individual {i} has {} traits, case map needs {}",
            pop[i].phenotype.dim(),
            map.dim
        )));
    }
    Ok(())
}

/// Keep the members of `pool` scoring the pool maximum on `case`, in order.
fn filter_on_case(pop: &Population, map: &TestCaseMap, case: usize, pool: &mut Vec<usize>) {
    let t = map.trait_of(case);
    let mut best = f64::NEG_INFINITY;
    let mut kept = 0;
    for r in 0..pool.len() {
        let i = pool[r];
        let score = pop[i].phenotype.traits()[t];
        if score > best {
            best = score;
            kept = 0;
        }
        if score == best {
            pool[kept] = i;
            kept += 1;
        }
    }
    pool.truncate(kept);
}

/// Members (in index order) attaining the population maximum on each trait.
///
/// The first filter of every event runs against the full population, so
/// caching its outcome per trait turns that step from O(N) into a copy.
fn trait_winners(pop: &Population, dim: usize) -> Vec<Vec<usize>> {
    (0..dim)
        .map(|t| {
            let best = pop
                .iter()
                .map(|ind| ind.phenotype.traits()[t])
                .fold(f64::NEG_INFINITY, f64::max);
            (0..pop.len())
                .filter(|&i| pop[i].phenotype.traits()[t] == best)
                .collect()
        })
        .collect()
}

/// Reusable buffers for repeated selection events.
#[derive(Debug, Default)]
pub struct Selector {
    order: Vec<usize>,
    pool: Vec<usize>,
}

impl Selector {
    pub fn new() -> Self {
        Self::default()
    }

    fn run_event(
        &mut self,
        pop: &Population,
        map: &TestCaseMap,
        rng: &mut RandomSource,
        winners: Option<&[Vec<usize>]>,
        mut trace: Option<&mut Vec<(usize, usize)>>,
    ) -> usize {
        self.order.clear();
        self.order.extend(0..map.total_cases());
        rng.shuffle(&mut self.order);

        self.pool.clear();
        let mut rest = &self.order[..];
        match (winners, pop.len()) {
            (Some(w), n) if n > 1 => {
                let first = self.order[0];
                self.pool.extend_from_slice(&w[map.trait_of(first)]);
                if let Some(t) = trace.as_deref_mut() {
                    t.push((first, self.pool.len()));
                }
                rest = &self.order[1..];
                // Members with equal trait vectors tie on every remaining case.
                if trace.is_none() {
                    let lead = pop[self.pool[0]].phenotype.traits();
                    if self.pool[1..].iter().all(|&i| pop[i].phenotype.traits() == lead) {
                        rest = &[];
                    }
                }
            }
            _ => self.pool.extend(0..pop.len()),
        }
        for &case in rest {
            if self.pool.len() == 1 {
                break;
            }
            filter_on_case(pop, map, case, &mut self.pool);
            if let Some(t) = trace.as_deref_mut() {
                t.push((case, self.pool.len()));
            }
        }
        match self.pool.len() {
            1 => self.pool[0],
            n => self.pool[rng.below(n)],
        }
    }

    pub fn select_one(&mut self, pop: &Population, map: &TestCaseMap, rng: &mut RandomSource) -> Result<usize> {
        check_ready(pop, map)?;
        Ok(self.run_event(pop, map, rng, None, None))
    }

    pub fn select_parents(
        &mut self,
        pop: &Population,
        map: &TestCaseMap,
        count: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<usize>> {
        check_ready(pop, map)?;
        if count == 0 {
            return Err(Error::Contract("parent count must be at least 1".into()));
        }
        let winners = trait_winners(pop, map.dim);
        Ok((0..count)
            .map(|_| self.run_event(pop, map, rng, Some(&winners), None))
            .collect())
    }

    /// Like [`Selector::select_one`] but records the shuffle and pool sizes.
    /// Consumes the random source identically.
    pub fn select_traced(
        &mut self,
        pop: &Population,
        map: &TestCaseMap,
        rng: &mut RandomSource,
    ) -> Result<SelectionEvent> {
        check_ready(pop, map)?;
        let mut survivor_trace = Vec::new();
        let selected = self.run_event(pop, map, rng, None, Some(&mut survivor_trace));
        Ok(SelectionEvent {
            shuffle: self.order.clone(),
            survivor_trace,
            selected,
        })
    }
}

pub fn select_one(pop: &Population, map: &TestCaseMap, rng: &mut RandomSource) -> Result<usize> {
    Selector::new().select_one(pop, map, rng)
}

/// `count` independent lexicase events, with replacement.
pub fn select_parents(
    pop: &Population,
    map: &TestCaseMap,
    count: usize,
    rng: &mut RandomSource,
) -> Result<Vec<usize>> {
    Selector::new().select_parents(pop, map, count, rng)
}

/// Write events as JSON lines.
pub fn write_trace<W: Write>(mut out: W, events: &[SelectionEvent]) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n").map_err(|e| Error::io("<trace>", e))?;
    }
    Ok(())
}

/// Exact selection probabilities by enumerating every case ordering.
///
/// Each ordering contributes `1 / total_cases!`; when several candidates
/// survive every case, that mass is split evenly among them. Duplicate cases
/// count as distinct orderings, exactly as the shuffle treats them.
pub fn selection_probabilities_oracle(pop: &Population, map: &TestCaseMap) -> Result<SelectionProbabilities> {
    let n_cases = map.total_cases();
    if n_cases > ORACLE_MAX_CASES {
        return Err(Error::SizeLimit(format!(
            "oracle enumerates at most {ORACLE_MAX_CASES} cases, got {n_cases}"
        )));
    }
    if pop.len() > ORACLE_MAX_POPULATION {
        return Err(Error::SizeLimit(format!(
            "oracle handles at most {ORACLE_MAX_POPULATION} individuals, got {}",
            pop.len()
        )));
    }
    check_ready(pop, map)?;

    let scores: Vec<Vec<f64>> = pop
        .iter()
        .map(|ind| (0..n_cases).map(|c| ind.phenotype.traits()[map.trait_of(c)]).collect())
        .collect();
    let mut mass = vec![0.0f64; pop.len()];
    let mut orderings = 0u64;
    for order in (0..n_cases).permutations(n_cases) {
        orderings += 1;
        let mut survivors: Vec<usize> = (0..pop.len()).collect();
        for case in order {
            let top = survivors
                .iter()
                .map(|&i| scores[i][case])
                .reduce(f64::max)
                .expect("pool never empties");
            survivors.retain(|&i| scores[i][case] == top);
        }
        let share = 1.0 / survivors.len() as f64;
        for i in survivors {
            mass[i] += share;
        }
    }
    Ok(SelectionProbabilities {
        probs: mass.into_iter().map(|m| m / orderings as f64).collect(),
    })
}
