//! A small experiment grid run end to end: treatments across population
//! sizes, replicates on a worker pool, CSV output and rank tests.
//!
//! Writes under the system temp directory unless `LEXIDIAG_OUTPUT` is set.

use lexidiag::analysis::{analyze_dir, AnalyzeOptions};
use lexidiag::experiment::parse_specs;
use lexidiag::runner::{run_experiment, RunOptions};

const SPEC: &str = r#"
name = "sweep"
diagnostic = "exploitation-rate"
dim = 10
population_sizes = [5, 25, 125]
evaluation_budget = 1_000_000
replicates = 8
master_seed = 31
snapshot_stride_evals = 100_000

[mutation]
per_gene_rate = 0.01
"#;

fn main() -> lexidiag::Result<()> {
    let mut spec = parse_specs("sweep.toml".as_ref(), SPEC)?.remove(0);
    spec.output_dir = std::env::temp_dir().join("lexidiag-examples");
    spec.apply_env_overrides();

    let outcome = run_experiment(&spec, &RunOptions::default())?;
    println!("{} replicates -> {}", outcome.executed, outcome.dir.display());

    let (analysis, _) = analyze_dir(&outcome.dir, &AnalyzeOptions::default())?;
    print!("{}", analysis.render());
    Ok(())
}
