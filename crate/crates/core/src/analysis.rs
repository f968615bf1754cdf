//! Statistical comparison of end-of-run metrics from a summary CSV.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticKind;
use crate::error::{Error, Result};
use crate::runner::{read_summary, SummaryRow};
use crate::stats::{compare_groups, Alternative, StatReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupBy {
    /// Compare population sizes, one report per redundancy level.
    PopulationSize,
    /// Compare redundancy levels, one report per population size.
    Redundancy,
}

impl std::str::FromStr for GroupBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population-size" | "population_size" => Ok(GroupBy::PopulationSize),
            "redundancy" => Ok(GroupBy::Redundancy),
            other => Err(Error::InvalidInput(format!("unknown grouping `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Summary column; defaults per diagnostic.
    pub metric: Option<String>,
    pub alpha: f64,
    pub alternative: Alternative,
    pub group_by: GroupBy,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            metric: None,
            alpha: 0.05,
            alternative: Alternative::TwoSided,
            group_by: GroupBy::PopulationSize,
        }
    }
}

/// Default end-of-run metric: final best performance for exploitation, best
/// satisfactory trait coverage otherwise.
pub fn default_metric(diagnostic: DiagnosticKind) -> &'static str {
    match diagnostic {
        DiagnosticKind::ExploitationRate => "best_performance",
        DiagnosticKind::ContradictoryObjectives => "best_satisfactory_coverage",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumReport {
    /// The factor held fixed, e.g. `redundant_cases = 0`.
    pub fixed: String,
    pub report: StatReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub metric: String,
    pub group_by: GroupBy,
    pub strata: Vec<StratumReport>,
}

impl Analysis {
    pub fn stratum(&self, fixed_value: usize) -> Option<&StatReport> {
        self.strata
            .iter()
            .find(|s| s.fixed.ends_with(&format!("= {fixed_value}")))
            .map(|s| &s.report)
    }

    pub fn render(&self) -> String {
        self.strata
            .iter()
            .map(|s| format!("== {} ==\n{}\n", s.fixed, s.report))
            .collect()
    }
}

/// Group rows and run the omnibus plus pairwise tests for each stratum.
pub fn analyze_rows(rows: &[SummaryRow], opts: &AnalyzeOptions) -> Result<Analysis> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Data("summary has no rows".into()))?;
    let metric = opts
        .metric
        .clone()
        .unwrap_or_else(|| default_metric(first.diagnostic).to_string());

    type Key = fn(&SummaryRow) -> (usize, usize);
    let (fixed_name, key): (&str, Key) = match opts.group_by {
        GroupBy::PopulationSize => ("redundant_cases", |r| (r.redundant_cases, r.population_size)),
        GroupBy::Redundancy => ("population_size", |r| (r.population_size, r.redundant_cases)),
    };
    let mut strata: BTreeMap<usize, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        let (fixed, group) = key(r);
        let slot = strata.entry(fixed).or_default().entry(group).or_default();
        if let Some(v) = r.metric(&metric)? {
            slot.push(v);
        }
    }

    let mut out = Vec::new();
    for (fixed, groups) in strata {
        let groups: Vec<(String, Vec<f64>)> = groups
            .into_iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(g, v)| (g.to_string(), v))
            .collect();
        if groups.len() < 2 {
            continue;
        }
        out.push(StratumReport {
            fixed: format!("{fixed_name} = {fixed}"),
            report: compare_groups(&metric, &groups, opts.alpha, opts.alternative)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Data(format!(
            "metric `{metric}` needs at least two non-empty groups to compare"
        )));
    }
    Ok(Analysis {
        metric,
        group_by: opts.group_by,
        strata: out,
    })
}

/// Analyze `<dir>/summary.csv`, writing `stats_<metric>.json` and `.txt` there.
pub fn analyze_dir(dir: &Path, opts: &AnalyzeOptions) -> Result<(Analysis, Vec<PathBuf>)> {
    let rows = read_summary(&dir.join("summary.csv"))?;
    let analysis = analyze_rows(&rows, opts)?;
    let json = dir.join(format!("stats_{}.json", analysis.metric));
    let txt = dir.join(format!("stats_{}.txt", analysis.metric));
    fs::write(&json, serde_json::to_vec_pretty(&analysis)?).map_err(|e| Error::io(&json, e))?;
    fs::write(&txt, analysis.render()).map_err(|e| Error::io(&txt, e))?;
    Ok((analysis, vec![json, txt]))
}
