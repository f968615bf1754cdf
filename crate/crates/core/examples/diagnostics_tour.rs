//! How each diagnostic turns a genotype into a phenotype, and how a
//! redundant case map points extra test cases at existing traits.

use lexidiag::diagnostics::activation_index;
use lexidiag::{build_case_map, case_score, DiagnosticKind, Genotype, RandomSource};

fn main() -> lexidiag::Result<()> {
    let genes = vec![12.0, 87.5, 40.0, 87.5, 3.0];
    for kind in [DiagnosticKind::ExploitationRate, DiagnosticKind::ContradictoryObjectives] {
        let ind = kind.evaluate(Genotype::new(genes.clone()));
        println!("{kind:<26} traits {:?}", ind.phenotype.traits());
        if let Some(a) = ind.activation_gene {
            println!("{:<26} activation gene {a} (first of the tied maxima)", "");
        }
    }
    assert_eq!(activation_index(&genes), 1);

    let mut rng = RandomSource::new(3);
    let map = build_case_map(5, 7, &mut rng)?;
    println!("\ncase -> trait with 7 redundant cases: {:?}", map.case_to_trait);
    println!("redundant tail: {:?}", map.redundant_tail());
    let ind = DiagnosticKind::ContradictoryObjectives.evaluate(Genotype::new(genes));
    let scores: Vec<f64> = (0..map.total_cases())
        .map(|c| case_score(&ind, c, &map))
        .collect::<lexidiag::Result<_>>()?;
    println!("case scores: {scores:?}");
    Ok(())
}
