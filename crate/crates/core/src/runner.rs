//! Replicate execution and on-disk output.
//!
//! Layout under `<output_dir>/<name>/`:
//!
//! - `trajectories/t{TT}_r{RRR}.csv`: down-sampled generation records
//! - `replicates/t{TT}_r{RRR}.json`: seed, case map, end-of-run summary and
//!   the SHA-256 of the trajectory file; written last, marks completion
//! - `summary.csv`: one row per replicate
//! - `experiment.json`: the resolved spec

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{DiagnosticKind, TestCaseMap};
use crate::error::{Error, Result};
use crate::evolution::{run, RecordSink, RunConfig, StridedSink};
use crate::experiment::{ExperimentSpec, Treatment};
use crate::metrics::GenerationRecord;

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "treatment",
    "replicate",
    "generation",
    "cumulative_evals",
    "best_performance",
    "best_so_far",
    "activation_coverage",
    "satisfactory_coverage",
];

pub const SUMMARY_HEADER: [&str; 14] = [
    "treatment",
    "replicate",
    "diagnostic",
    "population_size",
    "redundant_cases",
    "total_cases",
    "generations",
    "seed",
    "best_performance",
    "best_so_far",
    "activation_coverage",
    "satisfactory_coverage",
    "best_satisfactory_coverage",
    "first_satisfaction_evals",
];

const NA: &str = "NA";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

/// End-of-run metrics for one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub treatment: u32,
    pub replicate: u32,
    pub diagnostic: DiagnosticKind,
    pub population_size: usize,
    pub redundant_cases: usize,
    pub total_cases: usize,
    pub generations: u64,
    pub seed: u64,
    /// Best performance in the final population.
    pub best_performance: f64,
    pub best_so_far: f64,
    pub activation_coverage: Option<usize>,
    pub satisfactory_coverage: usize,
    pub best_satisfactory_coverage: usize,
    /// `None` when no satisfactory solution appeared (censored).
    pub first_satisfaction_evals: Option<u64>,
}

impl SummaryRow {
    fn fields(&self) -> Vec<String> {
        vec![
            self.treatment.to_string(),
            self.replicate.to_string(),
            self.diagnostic.name().to_string(),
            self.population_size.to_string(),
            self.redundant_cases.to_string(),
            self.total_cases.to_string(),
            self.generations.to_string(),
            self.seed.to_string(),
            self.best_performance.to_string(),
            self.best_so_far.to_string(),
            opt(self.activation_coverage),
            self.satisfactory_coverage.to_string(),
            self.best_satisfactory_coverage.to_string(),
            opt(self.first_satisfaction_evals),
        ]
    }

    /// Numeric value of a summary column; `None` for `NA`.
    pub fn metric(&self, name: &str) -> Result<Option<f64>> {
        Ok(match name {
            "best_performance" => Some(self.best_performance),
            "best_so_far" => Some(self.best_so_far),
            "activation_coverage" => self.activation_coverage.map(|v| v as f64),
            "satisfactory_coverage" => Some(self.satisfactory_coverage as f64),
            "best_satisfactory_coverage" => Some(self.best_satisfactory_coverage as f64),
            "first_satisfaction_evals" => self.first_satisfaction_evals.map(|v| v as f64),
            "generations" => Some(self.generations as f64),
            other => return Err(Error::InvalidInput(format!("unknown metric `{other}`"))),
        })
    }
}

/// Serializes generation records as trajectory CSV rows.
pub struct TrajectoryWriter {
    treatment: u32,
    replicate: u32,
    out: csv::Writer<Vec<u8>>,
}

impl TrajectoryWriter {
    pub fn new(treatment: u32, replicate: u32) -> Result<Self> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        out.write_record(TRAJECTORY_HEADER)?;
        Ok(Self {
            treatment,
            replicate,
            out,
        })
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        self.out
            .into_inner()
            .map_err(|e| Error::io("<trajectory buffer>", e.into_error()))
    }
}

impl RecordSink for TrajectoryWriter {
    fn record(&mut self, r: &GenerationRecord) -> Result<()> {
        self.out.write_record([
            self.treatment.to_string(),
            self.replicate.to_string(),
            r.generation.to_string(),
            r.cumulative_evaluations.to_string(),
            r.best_performance.to_string(),
            r.best_so_far.to_string(),
            opt(r.activation_gene_coverage),
            r.satisfactory_trait_coverage.to_string(),
        ])?;
        Ok(())
    }
}

/// Completion marker for one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateMeta {
    pub run_config: RunConfig,
    pub case_map: TestCaseMap,
    pub summary: SummaryRow,
    pub trajectory_file: String,
    pub trajectory_sha256: String,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: usize,
    /// Skip replicates whose output already exists and validates.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            resume: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub dir: PathBuf,
    pub rows: Vec<SummaryRow>,
    pub executed: usize,
    pub skipped: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn stem(treatment: u32, replicate: u32) -> String {
    format!("t{treatment:02}_r{replicate:03}")
}

pub fn trajectory_path(dir: &Path, treatment: u32, replicate: u32) -> PathBuf {
    dir.join("trajectories").join(format!("{}.csv", stem(treatment, replicate)))
}

pub fn meta_path(dir: &Path, treatment: u32, replicate: u32) -> PathBuf {
    dir.join("replicates").join(format!("{}.json", stem(treatment, replicate)))
}

/// Write through a temporary sibling and rename into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Run one replicate and persist its files.
pub fn run_replicate(
    spec: &ExperimentSpec,
    dir: &Path,
    treatment: &Treatment,
    replicate: u32,
) -> Result<ReplicateMeta> {
    let cfg = spec.run_config(treatment, replicate);
    let mut sink = StridedSink::new(TrajectoryWriter::new(treatment.index, replicate)?, cfg.snapshot_stride_evals);
    let result = run(&cfg, &mut sink)?;
    let bytes = sink.into_inner().into_bytes()?;

    let summary = SummaryRow {
        treatment: treatment.index,
        replicate,
        diagnostic: spec.diagnostic,
        population_size: treatment.population_size,
        redundant_cases: treatment.redundant_cases,
        total_cases: treatment.total_cases,
        generations: result.generations,
        seed: cfg.seed,
        best_performance: result.final_record.best_performance,
        best_so_far: result.best_so_far,
        activation_coverage: result.final_record.activation_gene_coverage,
        satisfactory_coverage: result.final_record.satisfactory_trait_coverage,
        best_satisfactory_coverage: result.best_satisfactory_coverage,
        first_satisfaction_evals: result.first_satisfaction_evals,
    };
    let traj = trajectory_path(dir, treatment.index, replicate);
    write_atomic(&traj, &bytes)?;
    let meta = ReplicateMeta {
        run_config: cfg,
        case_map: result.case_map,
        summary,
        trajectory_file: traj
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        trajectory_sha256: sha256_hex(&bytes),
    };
    write_atomic(
        &meta_path(dir, treatment.index, replicate),
        &serde_json::to_vec_pretty(&meta)?,
    )?;
    Ok(meta)
}

/// Previously completed replicate, if its marker exists.
///
/// A marker whose trajectory is missing or hashes differently is an error.
pub fn validate_existing(dir: &Path, treatment: u32, replicate: u32) -> Result<Option<ReplicateMeta>> {
    let mpath = meta_path(dir, treatment, replicate);
    if !mpath.exists() {
        return Ok(None);
    }
    let text = fs::read(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let meta: ReplicateMeta = serde_json::from_slice(&text).map_err(|e| Error::Checksum {
        path: mpath.clone(),
        expected: "a readable replicate marker".into(),
        found: e.to_string(),
    })?;
    let tpath = trajectory_path(dir, treatment, replicate);
    let found = match fs::read(&tpath) {
        Ok(bytes) => sha256_hex(&bytes),
        Err(_) => "<missing>".to_string(),
    };
    if found != meta.trajectory_sha256 {
        return Err(Error::Checksum {
            path: tpath,
            expected: meta.trajectory_sha256,
            found,
        });
    }
    Ok(Some(meta))
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    out.write_record(SUMMARY_HEADER)?;
    for r in rows {
        out.write_record(r.fields())?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let file = fs::File::open(path).map_err(|_| Error::Data(format!("{} not found", path.display())))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("{}: missing column `{name}`", path.display())))
    };
    let idx: Vec<usize> = SUMMARY_HEADER.iter().map(|h| col(h)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |field: &str| Error::Data(format!("{}: row {}: bad `{field}`", path.display(), line + 2));
        let get = |i: usize| rec.get(idx[i]).unwrap_or("");
        macro_rules! num {
            ($i:expr) => {
                get($i).parse().map_err(|_| bad(SUMMARY_HEADER[$i]))?
            };
        }
        macro_rules! opt_num {
            ($i:expr) => {
                match get($i) {
                    NA => None,
                    s => Some(s.parse().map_err(|_| bad(SUMMARY_HEADER[$i]))?),
                }
            };
        }
        rows.push(SummaryRow {
            treatment: num!(0),
            replicate: num!(1),
            diagnostic: get(2).parse().map_err(|_| bad("diagnostic"))?,
            population_size: num!(3),
            redundant_cases: num!(4),
            total_cases: num!(5),
            generations: num!(6),
            seed: num!(7),
            best_performance: num!(8),
            best_so_far: num!(9),
            activation_coverage: opt_num!(10),
            satisfactory_coverage: num!(11),
            best_satisfactory_coverage: num!(12),
            first_satisfaction_evals: opt_num!(13),
        });
    }
    Ok(rows)
}

/// Execute every (treatment, replicate) pair of `spec`.
///
/// Output bytes do not depend on `opts.workers`: each replicate owns its
/// seed and files, and the summary is sorted before writing.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let dir = spec.experiment_dir();
    for sub in ["trajectories", "replicates"] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
    }
    write_atomic(&dir.join("experiment.json"), &serde_json::to_vec_pretty(spec)?)?;

    let jobs: Vec<(Treatment, u32)> = spec
        .treatments()
        .into_iter()
        .flat_map(|t| (0..spec.replicates).map(move |r| (t, r)))
        .collect();

    let mut done = Vec::new();
    let mut pending = Vec::new();
    for (t, r) in jobs {
        match opts.resume.then(|| validate_existing(&dir, t.index, r)).transpose()?.flatten() {
            Some(meta) => done.push(meta.summary),
            None => pending.push((t, r)),
        }
    }
    let skipped = done.len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let fresh: Vec<SummaryRow> = pool.install(|| {
        pending
            .par_iter()
            .map(|(t, r)| run_replicate(spec, &dir, t, *r).map(|m| m.summary))
            .collect::<Result<_>>()
    })?;
    let executed = fresh.len();

    let mut rows = done;
    rows.extend(fresh);
    rows.sort_by_key(|r| (r.treatment, r.replicate));
    write_summary(&dir.join("summary.csv"), &rows)?;
    Ok(ExperimentOutcome {
        dir,
        rows,
        executed,
        skipped,
    })
}
