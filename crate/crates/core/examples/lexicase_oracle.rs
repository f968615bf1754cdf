//! Exact lexicase selection probabilities by enumerating case orderings,
//! compared with sampled frequencies.
//!
//! Four specialists each excel on one trait. With cases a,a,b,b,c,d the
//! duplicated traits come first in more orderings, so their specialists are
//! picked twice as often.

use lexidiag::fixture::{monte_carlo_frequencies, OracleFixture};
use lexidiag::selection_probabilities_oracle;

fn main() -> lexidiag::Result<()> {
    let specialists = vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ];
    for cases in [None, Some(vec![0, 0, 1, 1, 2, 3])] {
        let fixture = OracleFixture {
            phenotypes: specialists.clone(),
            case_to_trait: cases.clone(),
        };
        let (pop, map) = (fixture.population()?, fixture.case_map()?);
        let exact = selection_probabilities_oracle(&pop, &map)?;
        let sampled = monte_carlo_frequencies(&pop, &map, 200_000, 1)?;
        println!("cases {:?}", map.case_to_trait);
        for (i, (p, f)) in exact.probs.iter().zip(&sampled).enumerate() {
            println!("  specialist {i}: exact {p:.4}  sampled {f:.4}");
        }
    }

    // Dominated individuals get nothing; ties left after every case split evenly.
    let fixture = OracleFixture {
        phenotypes: vec![vec![3.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]],
        case_to_trait: None,
    };
    let exact = fixture.evaluate(0, 0)?.probabilities;
    println!("\n[3,1] [1,3] [2,2] [3,1]: {exact:?}");
    Ok(())
}
