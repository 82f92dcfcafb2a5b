//! `prm` — experiment harness for popularity ratio maximization.
//!
//! Subcommands: `run` (one result row per algorithm and budget), `compare`
//! (algorithms x budgets averaged over seeded repetitions), `minimize`
//! (smallest budget or round count reaching ratio 1), `justify`
//! (random-vs-expected growth and surrogate-vs-exact objective columns), and
//! `spread` (Monte Carlo spread of a seed set, for debugging).
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible target,
//! 4 internal error. Outputs are byte-identical for a fixed config and seed
//! (pass `--timing` to fill the wall-clock column instead of 0).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "prm", version, about = "Popularity ratio maximization experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's graph path.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Override the algorithm (comma list for compare).
    #[arg(long)]
    algo: Option<String>,
    /// Override the budget list, e.g. "20" or "20,50,100".
    #[arg(long)]
    k: Option<String>,
    /// Override the setting (OINS or NIOS).
    #[arg(long)]
    setting: Option<String>,
    /// Override the evaluation simulation count.
    #[arg(long)]
    sims: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run algorithms and report one row per (algorithm, budget).
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Record wall-clock milliseconds (off by default: keeps output
        /// byte-identical across runs).
        #[arg(long)]
        timing: bool,
    },
    /// Cross algorithms and budgets, averaged over seeded repetitions.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Find the smallest budget (mode=seeds) or horizon (mode=rounds)
    /// reaching popularity ratio 1.
    Minimize {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mode: String,
    },
    /// Compare random vs. expected growth and the surrogate vs. the exact
    /// objective on selected allocations over a budget sweep.
    Justify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Estimate the influence spread of a seed set.
    Spread {
        #[arg(long)]
        graph: PathBuf,
        /// Assign probabilities by the weighted-cascade rule (edge list has
        /// no probability column).
        #[arg(long)]
        wc: bool,
        /// Comma-separated node labels.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 10_000)]
        sims: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn load(common: &CommonArgs) -> Result<ExperimentConfig, (i32, String)> {
    let overrides = Overrides {
        graph: common.graph.clone(),
        algo: common.algo.clone(),
        k: common.k.clone(),
        setting: common.setting.clone(),
        sims: common.sims,
        seed: common.seed,
        out: common.out.clone(),
    };
    ExperimentConfig::load(&common.config, &overrides).map_err(|e| (2, e.to_string()))
}

fn emit(cfg_out: Option<&PathBuf>, text: &str) -> Result<(), (i32, String)> {
    match cfg_out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| (4, format!("cannot write {}: {e}", path.display()))),
    }
}

/// Persist the label -> dense id map next to a written output file.
fn emit_label_map(cfg: &ExperimentConfig, out: &PathBuf) -> Result<(), (i32, String)> {
    let graph = cfg.load_graph().map_err(|e| (2, e.to_string()))?;
    let mut text = String::from("id\tlabel\n");
    for (i, label) in graph.labels().iter().enumerate() {
        text.push_str(&format!("{i}\t{label}\n"));
    }
    let path = out.with_extension("labels.tsv");
    std::fs::write(&path, text).map_err(|e| (4, format!("cannot write {}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> Result<(), (i32, String)> {
    match cli.cmd {
        Cmd::Run { common, timing } => {
            let cfg = load(&common)?;
            let text = commands::cmd_run(&cfg, timing)?;
            emit(cfg.out.as_ref(), &text)?;
            if let Some(out) = &cfg.out {
                emit_label_map(&cfg, out)?;
            }
            Ok(())
        }
        Cmd::Compare { common } => {
            let cfg = load(&common)?;
            let text = commands::cmd_compare(&cfg)?;
            emit(cfg.out.as_ref(), &text)
        }
        Cmd::Minimize { common, mode } => {
            let cfg = load(&common)?;
            let text = commands::cmd_minimize(&cfg, &mode)?;
            emit(cfg.out.as_ref(), &text)
        }
        Cmd::Justify { common } => {
            let cfg = load(&common)?;
            let text = commands::cmd_justify(&cfg)?;
            emit(cfg.out.as_ref(), &text)
        }
        Cmd::Spread {
            graph,
            wc,
            seeds,
            sims,
            seed,
        } => {
            let text = std::fs::read_to_string(&graph)
                .map_err(|e| (2, format!("cannot read graph {}: {e}", graph.display())))?;
            let out = commands::cmd_spread(&text, wc, &seeds, sims, seed)?;
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
