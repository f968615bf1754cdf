use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lexidiag::analysis::{analyze_dir, AnalyzeOptions, GroupBy};
use lexidiag::experiment::{load_specs, plan_table};
use lexidiag::fixture::OracleFixture;
use lexidiag::runner::{run_experiment, RunOptions};
use lexidiag::selection::write_trace;
use lexidiag::stats::Alternative;
use lexidiag::Result;

#[derive(Parser)]
#[command(name = "lexidiag", version, about = "Lexicase selection diagnostics under a fixed evaluation budget")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every treatment and replicate of a spec file.
    Run {
        spec: PathBuf,
        /// Replicates run concurrently (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        /// Print the treatment table and exit.
        #[arg(long)]
        dry_run: bool,
        /// Skip replicates whose output already exists and validates.
        #[arg(long)]
        resume: bool,
    },
    /// Kruskal-Wallis plus pairwise Wilcoxon rank-sum tests over a run's summary.
    Analyze {
        dir: PathBuf,
        #[arg(long)]
        metric: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "two-sided")]
        alternative: Alternative,
        #[arg(long, default_value = "population-size")]
        group_by: GroupBy,
    },
    /// Exact lexicase selection probabilities for a small fixture.
    Oracle {
        fixture: PathBuf,
        /// Also estimate frequencies from this many selection events.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit this many traced selection events as JSON lines instead.
        #[arg(long)]
        trace: Option<usize>,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            spec,
            workers,
            dry_run,
            resume,
        } => {
            let mut specs = load_specs(&spec)?;
            for s in &mut specs {
                s.apply_env_overrides();
            }
            if dry_run {
                print!("{}", plan_table(&specs));
                return Ok(());
            }
            let mut opts = RunOptions {
                resume,
                ..RunOptions::default()
            };
            if let Some(w) = workers {
                opts.workers = w;
            }
            for s in &specs {
                let out = run_experiment(s, &opts)?;
                println!(
                    "{}: {} replicates run, {} reused -> {}",
                    s.name,
                    out.executed,
                    out.skipped,
                    out.dir.display()
                );
            }
        }
        Command::Analyze {
            dir,
            metric,
            alpha,
            alternative,
            group_by,
        } => {
            let opts = AnalyzeOptions {
                metric,
                alpha,
                alternative,
                group_by,
            };
            let (analysis, files) = analyze_dir(&dir, &opts)?;
            print!("{}", analysis.render());
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Oracle {
            fixture,
            samples,
            seed,
            trace,
        } => {
            let f = OracleFixture::load(&fixture)?;
            match trace {
                Some(n) => write_trace(std::io::stdout().lock(), &f.trace(n, seed)?)?,
                None => println!("{}", serde_json::to_string_pretty(&f.evaluate(samples, seed)?)?),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lexidiag: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
