use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use mibids::learn::ClassifierKind;
use mibids::MibGroup;
use mibids_cli::commands::{self, EvalArgs};
use mibids_cli::Selector;

#[derive(Parser)]
#[command(name = "mibids", version, about = "Attack classification from SNMP-MIB counters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Timing {
    /// Report model build times.
    Wall,
    /// Omit build times so outputs are byte-reproducible.
    Off,
}

#[derive(clap::Args)]
struct Common {
    /// Key-value settings file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a setting, e.g. `--set mlp.epochs=100` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset CSV
    Synth {
        #[command(flatten)]
        common: Common,
        /// Generator seed (overrides synth.seed)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank all features with a filter method
    Rank {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        /// infogain or relieff
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Ranking CSV; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Genetic wrapper search for a feature subset
    Select {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        /// bayes, mlp or svm
        #[arg(long)]
        classifier: String,
        /// Restrict the search to one MIB group
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Subset literal file; the trace goes to `<out>.trace.csv`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate one classifier on a feature subset
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        classifier: String,
        /// none, infogain-top:N, relieff-top:N, genetic, preset:NAME,
        /// group:NAME, group-genetic:NAME or a literal such as {3,7,9}
        #[arg(long, default_value = "none")]
        selector: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Timing::Wall)]
        timing: Timing,
        /// JSON report path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also train on all records and save the model text
        #[arg(long)]
        save_model: Option<PathBuf>,
    },
    /// Run an experiment spec file or the built-in `paper-matrix`
    Experiment {
        spec: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Master seed (overrides `seed`)
        #[arg(long)]
        seed: Option<u64>,
        /// Folds (overrides `cv.k`)
        #[arg(long)]
        k: Option<usize>,
        /// Dataset CSV (overrides `dataset.path`)
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Timing::Wall)]
        timing: Timing,
        /// Output directory (overrides `out.dir`)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn classifier(s: &str) -> Result<ClassifierKind> {
    Ok(s.parse()?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth { common, seed, out } => {
            let mut s = commands::settings(common.config.as_deref(), &common.overrides)?;
            if let Some(seed) = seed {
                s.set("synth.seed", &seed.to_string())?;
            }
            let n = commands::synth(&s, &out)?;
            eprintln!("wrote {n} records to {}", out.display());
        }
        Command::Rank { common, data, method, seed, out } => {
            let s = commands::settings(common.config.as_deref(), &common.overrides)?;
            commands::rank(&data, &method, &s, seed, out.as_deref())?;
        }
        Command::Select { common, data, classifier: c, group, seed, out } => {
            let s = commands::settings(common.config.as_deref(), &common.overrides)?;
            let group = group.map(|g| g.parse::<MibGroup>()).transpose()?;
            let subset = commands::select(&data, classifier(&c)?, group, &s, seed, out.as_deref())?;
            if out.is_some() {
                println!("{}", subset.to_literal());
            }
        }
        Command::Eval { common, data, classifier: c, selector, k, seed, timing, out, save_model } => {
            let s = commands::settings(common.config.as_deref(), &common.overrides)?;
            let args = EvalArgs {
                data: &data,
                classifier: classifier(&c)?,
                selector: selector.parse::<Selector>()?,
                k,
                seed,
                timing: matches!(timing, Timing::Wall),
                out: out.as_deref(),
                save_model: save_model.as_deref(),
            };
            print!("{}", commands::eval(&args, &s)?);
        }
        Command::Experiment { spec, mut overrides, seed, k, data, jobs, timing, out } => {
            if let Some(seed) = seed {
                overrides.push(format!("seed={seed}"));
            }
            if let Some(k) = k {
                overrides.push(format!("cv.k={k}"));
            }
            if let Some(d) = data {
                let abs = std::path::absolute(&d)?;
                overrides.push(format!("dataset.path={}", abs.display()));
            }
            let o = commands::experiment(&spec, &overrides, out.as_deref(), jobs, matches!(timing, Timing::Wall))?;
            eprintln!(
                "{} cells, {} failed; reports in {}",
                o.cells,
                o.failures,
                o.out_dir.display()
            );
            if o.failures > 0 {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
