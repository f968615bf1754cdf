//! Lexicase selection under diagnostic landscapes.
//!
//! Evolves real-valued genotypes by mutation only, picks parents with
//! lexicase selection and measures how population size and test-case
//! redundancy trade off against the number of generations a fixed
//! evaluation budget allows.
//!
//! - [`diagnostics`]: exploitation rate and contradictory objectives
//!   transforms, and the (possibly redundant) test-case map
//! - [`selection`]: lexicase selection and an exact enumeration oracle
//! - [`evolution`]: mutation with absolute-value and rebound rules, the
//!   budgeted generational loop
//! - [`metrics`]: performance, satisfaction and coverage measurements
//! - [`stats`]: Kruskal-Wallis, Wilcoxon rank-sum, Bonferroni
//! - [`experiment`], [`runner`], [`analysis`]: spec files, replicate
//!   execution with CSV output, and statistical analysis of results
//!
//! ```
//! use lexidiag::{run, DiagnosticKind, MutationConfig, RunConfig};
//!
//! let cfg = RunConfig {
//!     diagnostic: DiagnosticKind::ExploitationRate,
//!     dim: 10,
//!     population_size: 20,
//!     redundant_cases: 0,
//!     evaluation_budget: 20 * 10 * 50,
//!     mutation: MutationConfig { per_gene_rate: 0.05, ..MutationConfig::default() },
//!     seed: 42,
//!     snapshot_stride_evals: 0,
//! };
//! let mut records = Vec::new();
//! let result = run(&cfg, &mut records).unwrap();
//! assert_eq!(result.generations, 50);
//! assert_eq!(records.len(), 51);
//! ```

pub mod analysis;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod fixture;
pub mod genome;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod selection;
pub mod stats;

pub use diagnostics::{build_case_map, case_score, DiagnosticKind, TestCaseMap};
pub use error::{Error, Result};
pub use evolution::{generations_for_budget, mutate, run, MutationConfig, RecordSink, RunConfig, RunResult};
pub use experiment::{load_specs, ExperimentSpec, Treatment};
pub use genome::{random_genotype, Genotype, Individual, Phenotype, Population};
pub use metrics::GenerationRecord;
pub use rng::RandomSource;
pub use selection::{select_one, select_parents, selection_probabilities_oracle, SelectionProbabilities};
