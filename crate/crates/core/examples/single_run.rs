//! One evolutionary run on the contradictory objectives diagnostic,
//! printing a down-sampled trajectory.

use lexidiag::evolution::StridedSink;
use lexidiag::{run, DiagnosticKind, MutationConfig, RunConfig};

fn main() -> lexidiag::Result<()> {
    let cfg = RunConfig {
        diagnostic: DiagnosticKind::ContradictoryObjectives,
        dim: 20,
        population_size: 100,
        redundant_cases: 0,
        evaluation_budget: 4_000_000,
        mutation: MutationConfig {
            per_gene_rate: 0.05,
            ..MutationConfig::default()
        },
        seed: 17,
        snapshot_stride_evals: 0,
    };
    let mut sink = StridedSink::new(Vec::new(), 400_000);
    let result = run(&cfg, &mut sink)?;

    println!("{:>5} {:>10} {:>9} {:>10} {:>12}", "gen", "evals", "best", "activation", "satisfactory");
    for r in sink.into_inner() {
        println!(
            "{:>5} {:>10} {:>9.3} {:>10} {:>12}",
            r.generation,
            r.cumulative_evaluations,
            r.best_performance,
            r.activation_gene_coverage.unwrap_or(0),
            r.satisfactory_trait_coverage
        );
    }
    println!(
        "\n{} generations, {} evaluations, best satisfactory coverage {}",
        result.generations, result.total_evaluations, result.best_satisfactory_coverage
    );
    Ok(())
}
