//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs the desk-scale experiments twice (8 workers, then 1), so expect a
//! few minutes of wall time on a single core.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use itertools::Itertools;
use lexidiag::analysis::{analyze_rows, AnalyzeOptions, GroupBy};
use lexidiag::evolution::fold_into_bounds;
use lexidiag::experiment::load_specs;
use lexidiag::fixture::monte_carlo_frequencies;
use lexidiag::runner::{run_experiment, RunOptions, SummaryRow};
use lexidiag::stats::{kruskal_wallis, wilcoxon_rank_sum, StatReport};
use lexidiag::{
    mutate, selection_probabilities_oracle, Genotype, Individual, MutationConfig, Phenotype, Population,
    RandomSource, TestCaseMap,
};
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn spec_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Desk {
    _tmp: TempDir,
    root: PathBuf,
    exploitation: Vec<SummaryRow>,
    contradictory: Vec<SummaryRow>,
}

fn run_desk(workers: usize) -> Result<Desk, String> {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let root = tmp.path().join("desk");
    let mut specs = load_specs(&spec_path("desk-scale.toml")).map_err(|e| e.to_string())?;
    let opts = RunOptions { workers, resume: false };
    let mut rows = BTreeMap::new();
    for s in &mut specs {
        s.output_dir = root.clone();
        let out = run_experiment(s, &opts).map_err(|e| e.to_string())?;
        rows.insert(s.name.clone(), out.rows);
    }
    Ok(Desk {
        _tmp: tmp,
        root,
        exploitation: rows.remove("desk-exploitation").ok_or("missing desk-exploitation")?,
        contradictory: rows.remove("desk-contradictory").ok_or("missing desk-contradictory")?,
    })
}

/// Medians strictly decrease along `order` and every pair among them is
/// significant after adjustment.
fn ordered(report: &StatReport, order: &[&str]) -> Outcome {
    let medians: Vec<f64> = order
        .iter()
        .map(|g| report.group(g).map(|s| s.median).ok_or(format!("no group {g}")))
        .collect::<Result<_, _>>()?;
    let mut detail: Vec<String> = order.iter().zip(&medians).map(|(g, m)| format!("{g}: {m:.4}")).collect();
    let mut ok = medians.windows(2).all(|w| w[0] > w[1]);
    for (a, b) in order.iter().tuple_combinations() {
        let p = report.pair(a, b).ok_or(format!("no pair {a}/{b}"))?;
        ok &= p.adjusted_p < 0.05;
        detail.push(format!("p[{a},{b}]={:.2e}", p.adjusted_p));
    }
    check(ok, format!("medians {}", detail.join(", ")))
}

fn analysis(rows: &[SummaryRow], metric: &str, group_by: GroupBy, stratum: usize) -> Result<StatReport, String> {
    let opts = AnalyzeOptions {
        metric: Some(metric.into()),
        group_by,
        ..AnalyzeOptions::default()
    };
    let a = analyze_rows(rows, &opts).map_err(|e| e.to_string())?;
    a.stratum(stratum).cloned().ok_or(format!("no stratum {stratum}"))
}

fn exploitation_ordering(desk: &Desk) -> Outcome {
    let r = analysis(&desk.exploitation, "best_performance", GroupBy::PopulationSize, 0)?;
    ordered(&r, &["10", "50", "250"])
}

fn specialist_ordering(desk: &Desk) -> Outcome {
    let r = analysis(&desk.contradictory, "activation_coverage", GroupBy::PopulationSize, 0)?;
    ordered(&r, &["250", "50", "10"])
}

fn redundancy_degradation(desk: &Desk) -> Outcome {
    let r = analysis(&desk.contradictory, "best_satisfactory_coverage", GroupBy::Redundancy, 250)?;
    ordered(&r, &["0", "80"])
}

fn table_arithmetic() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_lexidiag"))
        .args(["run", "--dry-run"])
        .arg(spec_path("paper-full.toml"))
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let expected: BTreeMap<(u64, u64), u64> = [
        (50, [300_000, 150_000, 100_000, 60_000]),
        (100, [150_000, 75_000, 50_000, 30_000]),
        (500, [30_000, 15_000, 10_000, 6_000]),
        (1000, [15_000, 7_500, 5_000, 3_000]),
        (5000, [3_000, 1_500, 1_000, 600]),
    ]
    .into_iter()
    .flat_map(|(pop, row)| [0, 100, 200, 400].into_iter().zip(row).map(move |(red, g)| ((pop, red), g)))
    .collect();
    let mut seen = BTreeMap::new();
    let mut mismatches = Vec::new();
    for line in String::from_utf8_lossy(&out.stdout).lines().skip(1) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| f[i].parse::<u64>().map_err(|e| format!("{line}: {e}"));
        let (pop, red, gens) = (num(3)?, num(4)?, num(6)?);
        if expected.get(&(pop, red)) != Some(&gens) {
            mismatches.push(format!("pop {pop} red {red}: {gens}"));
        }
        *seen.entry((pop, red)).or_insert(0u32) += 1;
    }
    let covered = expected.keys().all(|k| seen.contains_key(k));
    check(
        covered && mismatches.is_empty(),
        format!(
            "{} table cells covered by {} rows, mismatches {:?}",
            seen.len(),
            seen.values().sum::<u32>(),
            mismatches
        ),
    )
}

fn population(rows: &[Vec<f64>]) -> Population {
    rows.iter()
        .map(|r| Individual {
            genotype: Genotype::new(r.clone()),
            phenotype: Phenotype::from(r.clone()),
            activation_gene: None,
        })
        .collect()
}

fn oracle_fixtures() -> Vec<(Population, TestCaseMap)> {
    let mut rng = RandomSource::new(20_240_501);
    let mut out = Vec::new();
    // Fixed duplicated-case layouts, then random ones.
    let layouts: [(usize, Vec<usize>); 3] = [(3, vec![0, 0, 1, 1, 2]), (2, vec![0, 0, 1, 1]), (4, vec![0, 1, 2, 3, 3])];
    for k in 0..10 {
        let (dim, cases) = match layouts.get(k) {
            Some(l) => l.clone(),
            None => {
                let dim = 1 + rng.below(4);
                let mut cases: Vec<usize> = (0..dim).collect();
                let extra = rng.below(6 - dim);
                cases.extend((0..extra).map(|_| rng.below(dim)));
                (dim, cases)
            }
        };
        let n = 2 + rng.below(7);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.below(4) as f64).collect()).collect();
        out.push((population(&rows), TestCaseMap::from_cases(dim, cases).unwrap()));
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut dup = 0;
    for (k, (pop, map)) in oracle_fixtures().iter().enumerate() {
        let exact = selection_probabilities_oracle(pop, map).map_err(|e| e.to_string())?;
        let freq = monte_carlo_frequencies(pop, map, 100_000, 7_000 + k as u64).map_err(|e| e.to_string())?;
        for (p, f) in exact.probs.iter().zip(&freq) {
            worst = worst.max((p - f).abs());
        }
        dup += usize::from(map.redundant_count > 0);
    }
    check(
        worst <= 0.01,
        format!("10 fixtures ({dup} with duplicated cases), max |exact - sampled| = {worst:.5}"),
    )
}

fn mutation_bounds() -> Outcome {
    let mut rng = RandomSource::new(77);
    let mut genes = 0usize;
    let mut outside = 0usize;
    let mut changed = 0usize;
    // Starts crowd the boundaries; the wide block forces repeated folds.
    for (block, sd) in [(900, 1.0), (100, 250.0)] {
        let cfg = MutationConfig {
            per_gene_rate: 1.0,
            gaussian_sd: sd,
            ..MutationConfig::default()
        };
        for _ in 0..block {
            let g = Genotype::new(
                (0..1000)
                    .map(|i| match i % 3 {
                        0 => rng.uniform(0.0, 2.0),
                        1 => rng.uniform(98.0, 100.0),
                        _ => rng.uniform(0.0, 100.0),
                    })
                    .collect(),
            );
            let m = mutate(&g, &cfg, &mut rng);
            for (a, b) in g.genes().iter().zip(m.genes()) {
                genes += 1;
                changed += usize::from(a != b);
                outside += usize::from(!(0.0..=100.0).contains(b));
            }
        }
    }
    let low = fold_into_bounds(-0.7, 100.0);
    let high = fold_into_bounds(102.3, 100.0);
    check(
        genes >= 1_000_000 && outside == 0 && low == 0.7 && high == 97.7,
        format!("{changed} of {genes} genes moved, {outside} out of range; -0.7 -> {low}, 102.3 -> {high}"),
    )
}

/// Two-sided p from all rank placements of the first sample.
fn enumerated_p(na: usize, nb: usize, u_obs: usize) -> f64 {
    let offset = na * (na + 1) / 2;
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for ranks in (1..=na + nb).combinations(na) {
        let u = ranks.iter().sum::<usize>() - offset;
        total += 1;
        le += u64::from(u <= u_obs);
        ge += u64::from(u >= u_obs);
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

fn statistics() -> Outcome {
    let mut pairs = 0usize;
    let mut worst = 0.0f64;
    for n in 2..=12usize {
        for na in 1..n {
            let nb = n - na;
            for a_ranks in (1..=n).combinations(na) {
                let a: Vec<f64> = a_ranks.iter().map(|&r| r as f64).collect();
                let b: Vec<f64> = (1..=n).filter(|r| !a_ranks.contains(r)).map(|r| r as f64).collect();
                let got = wilcoxon_rank_sum(&a, &b).map_err(|e| e.to_string())?;
                let u = a_ranks.iter().sum::<usize>() - na * (na + 1) / 2;
                worst = worst.max((got.p - enumerated_p(na, nb, u)).abs());
                pairs += 1;
            }
        }
    }
    let kw = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 9.0]])
        .map_err(|e| e.to_string())?;
    check(
        worst <= 0.02 && (kw.h - 7.2).abs() <= 1e-9,
        format!("{pairs} no-tie arrangements, max |p - enumerated| = {worst:.2e}; H = {}", kw.h),
    )
}

fn trajectories(root: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for exp in fs::read_dir(root).map_err(|e| e.to_string())? {
        let dir = exp.map_err(|e| e.to_string())?.path().join("trajectories");
        for f in fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let p = f.map_err(|e| e.to_string())?.path();
            let bytes = fs::read(&p).map_err(|e| e.to_string())?;
            out.insert(p.strip_prefix(root).unwrap().to_path_buf(), bytes);
        }
    }
    Ok(out)
}

fn determinism(eight: &Desk) -> Outcome {
    let one = run_desk(1)?;
    let a = trajectories(&eight.root)?;
    let b = trajectories(&one.root)?;
    let differing = a.iter().filter(|(k, v)| b.get(*k) != Some(v)).count();
    check(
        a.len() == b.len() && !a.is_empty() && differing == 0,
        format!("{} trajectory files at 8 workers, {} at 1, {differing} differ", a.len(), b.len()),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let desk = run_desk(8);
    println!("desk-scale run finished in {:.1}s", started.elapsed().as_secs_f64());
    let on_desk = |f: fn(&Desk) -> Outcome| desk.as_ref().map_err(Clone::clone).and_then(f);
    let criteria: [(&str, &dyn Fn() -> Outcome); 8] = [
        ("1 exploitation ordering", &|| on_desk(exploitation_ordering)),
        ("2 specialist ordering", &|| on_desk(specialist_ordering)),
        ("3 redundancy degradation", &|| on_desk(redundancy_degradation)),
        ("4 generation table", &table_arithmetic),
        ("5 lexicase oracle", &oracle_equivalence),
        ("6 mutation bounds", &mutation_bounds),
        ("7 statistics", &statistics),
        ("8 determinism", &|| on_desk(determinism)),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {name} ({:.1}s): {detail}", t.elapsed().as_secs_f64());
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
