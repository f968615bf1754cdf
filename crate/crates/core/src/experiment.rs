//! Experiment specs: treatment grid, planning and replicate seeding.
//!
//! A spec file is TOML (or the equivalent JSON) describing one experiment,
//! or a suite of experiments as repeated `[[experiment]]` tables:
//!
//! ```toml
//! name = "desk-exploitation"
//! diagnostic = "exploitation-rate"
//! dim = 20
//! population_sizes = [10, 50, 250]
//! redundancy_levels = [0]
//! evaluation_budget = 20_000_000
//! replicates = 20
//! master_seed = 1
//! output_dir = "results"
//! snapshot_stride_evals = 1_000_000
//!
//! [mutation]
//! per_gene_rate = 0.005
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticKind;
use crate::error::{Error, Result};
use crate::evolution::{MutationConfig, RunConfig};
use crate::rng::derive_seed;

/// Environment variable that replaces every experiment's `output_dir`.
pub const OUTPUT_ENV: &str = "LEXIDIAG_OUTPUT";

fn default_redundancy() -> Vec<usize> {
    vec![0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_stride() -> u64 {
    100_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub diagnostic: DiagnosticKind,
    pub dim: usize,
    pub population_sizes: Vec<usize>,
    #[serde(default = "default_redundancy")]
    pub redundancy_levels: Vec<usize>,
    pub evaluation_budget: u64,
    pub replicates: u32,
    pub master_seed: u64,
    #[serde(default)]
    pub mutation: MutationConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_stride")]
    pub snapshot_stride_evals: u64,
}

/// One cell of the population size x redundancy grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Treatment {
    pub index: u32,
    pub population_size: usize,
    pub redundant_cases: usize,
    pub total_cases: usize,
    pub generations: u64,
}

impl ExperimentSpec {
    /// Treatments in grid order: population sizes outer, redundancy inner.
    pub fn treatments(&self) -> Vec<Treatment> {
        let mut out = Vec::new();
        for &population_size in &self.population_sizes {
            for &redundant_cases in &self.redundancy_levels {
                let total_cases = self.dim + redundant_cases;
                let per_gen = population_size as u64 * total_cases as u64;
                out.push(Treatment {
                    index: out.len() as u32,
                    population_size,
                    redundant_cases,
                    total_cases,
                    generations: self.evaluation_budget.checked_div(per_gen).unwrap_or(0),
                });
            }
        }
        out
    }

    pub fn run_config(&self, treatment: &Treatment, replicate: u32) -> RunConfig {
        RunConfig {
            diagnostic: self.diagnostic,
            dim: self.dim,
            population_size: treatment.population_size,
            redundant_cases: treatment.redundant_cases,
            evaluation_budget: self.evaluation_budget,
            mutation: self.mutation,
            seed: derive_seed(self.master_seed, treatment.index, replicate),
            snapshot_stride_evals: self.snapshot_stride_evals,
        }
    }

    /// Directory holding this experiment's output.
    pub fn experiment_dir(&self) -> PathBuf {
        self.output_dir.join(&self.name)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("experiment `{}`: {msg}", self.name)));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
            || self.name.starts_with('.')
        {
            return bad("name must be non-empty and use only [A-Za-z0-9._-]".into());
        }
        if self.population_sizes.is_empty() {
            return bad("population_sizes is empty".into());
        }
        if self.redundancy_levels.is_empty() {
            return bad("redundancy_levels is empty".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        for t in self.treatments() {
            self.run_config(&t, 0).validate().or_else(|e| bad(e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_env_overrides(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_ENV) {
            self.output_dir = PathBuf::from(dir);
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Suite {
    experiment: Vec<ExperimentSpec>,
}

enum Format {
    Toml,
    Json,
}

fn detect_format(path: &Path, text: &str) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("toml") => Format::Toml,
        _ if text.trim_start().starts_with('{') => Format::Json,
        _ => Format::Toml,
    }
}

/// Parse spec text: a single experiment or a suite under `experiment`.
pub fn parse_specs(path: &Path, text: &str) -> Result<Vec<ExperimentSpec>> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let specs = match detect_format(path, text) {
        Format::Toml => {
            let value: toml::Table = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
            if value.contains_key("experiment") {
                toml::from_str::<Suite>(text).map_err(|e| parse_err(e.to_string()))?.experiment
            } else {
                vec![toml::from_str::<ExperimentSpec>(text).map_err(|e| parse_err(e.to_string()))?]
            }
        }
        Format::Json => {
            let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
            if value.get("experiment").is_some() {
                serde_json::from_str::<Suite>(text).map_err(|e| parse_err(e.to_string()))?.experiment
            } else {
                vec![serde_json::from_str::<ExperimentSpec>(text).map_err(|e| parse_err(e.to_string()))?]
            }
        }
    };
    if specs.is_empty() {
        return Err(parse_err("no experiments defined".into()));
    }
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(parse_err(format!("duplicate experiment name `{}`", w[0])));
    }
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

pub fn load_specs(path: &Path) -> Result<Vec<ExperimentSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_specs(path, &text)
}

/// Human-readable treatment table.
pub fn plan_table(specs: &[ExperimentSpec]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<28} {:<26} {:>9} {:>10} {:>11} {:>6} {:>12} {:>10}",
        "experiment", "diagnostic", "treatment", "population", "redundancy", "cases", "generations", "replicates"
    );
    for spec in specs {
        for t in spec.treatments() {
            let _ = writeln!(
                s,
                "{:<28} {:<26} {:>9} {:>10} {:>11} {:>6} {:>12} {:>10}",
                spec.name,
                spec.diagnostic.name(),
                t.index,
                t.population_size,
                t.redundant_cases,
                t.total_cases,
                t.generations,
                spec.replicates
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = r#"
name = "toy"
diagnostic = "contradictory-objectives"
dim = 5
population_sizes = [4, 8]
redundancy_levels = [0, 5]
evaluation_budget = 4000
replicates = 3
master_seed = 9

[mutation]
per_gene_rate = 0.01
"#;

    #[test]
    fn single_spec_defaults() {
        let specs = parse_specs(Path::new("toy.toml"), SINGLE).unwrap();
        let s = &specs[0];
        assert_eq!(s.mutation.gaussian_sd, 1.0);
        assert_eq!(s.mutation.per_gene_rate, 0.01);
        assert_eq!(s.output_dir, PathBuf::from("results"));
        assert_eq!(s.snapshot_stride_evals, 100_000_000);
        let t = s.treatments();
        assert_eq!(t.len(), 4);
        assert_eq!((t[1].population_size, t[1].redundant_cases, t[1].total_cases), (4, 5, 10));
        assert_eq!(t[3].generations, 4000 / 80);
    }

    #[test]
    fn json_and_toml_agree() {
        let json = r#"{"name": "toy", "diagnostic": "contradictory-objectives", "dim": 5,
            "population_sizes": [4, 8], "redundancy_levels": [0, 5], "evaluation_budget": 4000,
            "replicates": 3, "master_seed": 9, "mutation": {"per_gene_rate": 0.01}}"#;
        let a = parse_specs(Path::new("toy.json"), json).unwrap();
        let b = parse_specs(Path::new("toy.toml"), SINGLE).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_errors_name_the_field_and_line() {
        let broken = SINGLE.replace("dim = 5", "dim = \"five\"");
        let err = parse_specs(Path::new("x.toml"), &broken).unwrap_err();
        let msg = err.to_string();
        assert_eq!(err.exit_code(), 2);
        assert!(msg.contains("dim") && msg.contains("line"), "{msg}");

        let unknown = format!("{SINGLE}\n[extra]\nx = 1\n");
        assert!(parse_specs(Path::new("x.toml"), &unknown).unwrap_err().to_string().contains("extra"));
    }

    #[test]
    fn budget_below_one_generation_is_rejected() {
        let small = SINGLE.replace("evaluation_budget = 4000", "evaluation_budget = 30");
        let err = parse_specs(Path::new("x.toml"), &small).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn redundancy_needs_contradictory() {
        let bad = SINGLE.replace("contradictory-objectives", "exploitation-rate");
        assert!(parse_specs(Path::new("x.toml"), &bad).is_err());
    }

    #[test]
    fn suite_with_duplicate_names_is_rejected() {
        let block = SINGLE.replace("name = \"toy\"", "[[experiment]]\nname = \"toy\"").replace("[mutation]", "[experiment.mutation]");
        let suite = format!("{block}\n{block}");
        let err = parse_specs(Path::new("s.toml"), &suite).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let one = parse_specs(Path::new("s.toml"), &block).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn replicate_seeds_are_distinct() {
        let s = &parse_specs(Path::new("toy.toml"), SINGLE).unwrap()[0];
        let mut seeds = std::collections::HashSet::new();
        for t in s.treatments() {
            for r in 0..s.replicates {
                assert!(seeds.insert(s.run_config(&t, r).seed));
            }
        }
    }
}
