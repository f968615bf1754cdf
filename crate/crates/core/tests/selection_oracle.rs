//! Lexicase sampling against exhaustive enumeration.

use lexidiag::fixture::monte_carlo_frequencies;
use lexidiag::{selection_probabilities_oracle, Genotype, Individual, Phenotype, Population, RandomSource, TestCaseMap};

fn population(rows: &[Vec<f64>]) -> Population {
    rows.iter()
        .map(|r| Individual {
            genotype: Genotype::new(r.clone()),
            phenotype: Phenotype::from(r.clone()),
            activation_gene: None,
        })
        .collect()
}

fn random_fixture(rng: &mut RandomSource) -> (Population, TestCaseMap) {
    let n = 1 + rng.below(8);
    let dim = 1 + rng.below(4);
    let extra = rng.below(6 - dim);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.below(4) as f64).collect())
        .collect();
    let mut cases: Vec<usize> = (0..dim).collect();
    cases.extend((0..extra).map(|_| rng.below(dim)));
    (population(&rows), TestCaseMap::from_cases(dim, cases).unwrap())
}

#[test]
fn oracle_probabilities_form_a_distribution() {
    let mut rng = RandomSource::new(5);
    for _ in 0..200 {
        let (pop, map) = random_fixture(&mut rng);
        let p = selection_probabilities_oracle(&pop, &map).unwrap();
        assert!((p.sum() - 1.0).abs() <= 1e-12);
        assert!(p.probs.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}

#[test]
fn sampling_matches_oracle_and_never_picks_zero_mass() {
    let mut rng = RandomSource::new(99);
    for k in 0..6 {
        let (pop, map) = random_fixture(&mut rng);
        let exact = selection_probabilities_oracle(&pop, &map).unwrap();
        let freq = monte_carlo_frequencies(&pop, &map, 100_000, 1000 + k).unwrap();
        for (p, f) in exact.probs.iter().zip(&freq) {
            assert!((p - f).abs() <= 0.01, "exact {p} vs sampled {f}");
            if *p == 0.0 {
                assert_eq!(*f, 0.0);
            }
        }
    }
}

#[test]
fn elite_on_every_case_is_always_selected() {
    let rows = vec![vec![1.0, 4.0, 2.0], vec![5.0, 5.0, 5.0], vec![4.9, 4.9, 4.9]];
    let pop = population(&rows);
    let map = TestCaseMap::from_cases(3, vec![0, 1, 2, 2]).unwrap();
    assert_eq!(selection_probabilities_oracle(&pop, &map).unwrap().probs, vec![0.0, 1.0, 0.0]);
}

/// Four single-trait specialists under cases a,a,b,b,c,d: the duplicated
/// traits lead the shuffle twice as often.
#[test]
fn duplicated_cases_skew_first_position() {
    let rows: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|t| if t == i { 1.0 } else { 0.0 }).collect())
        .collect();
    let pop = population(&rows);
    let plain = selection_probabilities_oracle(&pop, &TestCaseMap::identity(4)).unwrap();
    assert!(plain.probs.iter().all(|&p| (p - 0.25).abs() < 1e-12));
    let skewed = selection_probabilities_oracle(&pop, &TestCaseMap::from_cases(4, vec![0, 0, 1, 1, 2, 3]).unwrap()).unwrap();
    for (p, want) in skewed.probs.iter().zip([2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]) {
        assert!((p - want).abs() < 1e-12);
    }
}
