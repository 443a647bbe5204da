//! `copreg`: simulate data, fit and apply copula regression models, score
//! predictions and reproduce the simulation tables.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 I/O error,
//! 4 numerical failure.

mod commands;
mod config;
mod error;
mod table;

use clap::{Args, Parser, Subcommand};
use commands::Tuning;
use config::RunConfig;
use copreg_core::simlab::{DgpId, TableId};
use copreg_core::{Family, Pooling};
use error::CliResult;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "copreg", version, about = "Copula regression for continuous and binary responses")]
struct Cli {
    /// Flat `key = value` file; flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a dataset from a simulation design and write it as CSV.
    Simulate {
        #[arg(long)]
        dgp: Option<DgpId>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add the latent success probability as column `z_true`.
        #[arg(long)]
        z_true: bool,
    },
    /// Fit a model to a CSV with columns x1..xd and y.
    Fit {
        /// `cr` (continuous response) or `bocr` (binary response).
        #[arg(long)]
        task: Option<String>,
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Model file to write.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Append a `prediction` column to a CSV of covariates.
    Predict {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a CSV with `prediction` and `y` columns.
    Eval {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Comma-separated subset of auc, ks, mse.
        #[arg(long)]
        metrics: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a simulation table (T1, T2 or T4).
    Bench {
        #[arg(long)]
        table: Option<TableId>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
        /// Training-set size.
        #[arg(long)]
        n: Option<usize>,
        /// Evaluation-set (continuous) or test-set (binary) size.
        #[arg(long)]
        eval_size: Option<usize>,
        /// Prefix of the report files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
}

#[derive(Args)]
struct TuningArgs {
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    pooling: Option<Pooling>,
    /// Step size ε/√t instead of a constant ε.
    #[arg(long)]
    decay: bool,
}

impl From<TuningArgs> for Tuning {
    fn from(t: TuningArgs) -> Self {
        Tuning {
            step: t.step,
            mc_samples: t.mc_samples,
            max_iter: t.max_iter,
            grad_tol: t.grad_tol,
            pooling: t.pooling,
            decay: t.decay,
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Simulate {
            dgp,
            n,
            seed,
            out,
            z_true,
        } => commands::simulate(&cfg, commands::SimulateArgs { dgp, n, seed, out, z_true }),
        Command::Fit {
            task,
            family,
            data,
            out,
            seed,
            tuning,
        } => commands::fit(
            &cfg,
            commands::FitArgs {
                task,
                family,
                data,
                out,
                seed,
                tuning: tuning.into(),
            },
        ),
        Command::Predict { model, data, out } => commands::predict(&cfg, commands::PredictArgs { model, data, out }),
        Command::Eval { data, metrics, out } => commands::eval(&cfg, commands::EvalArgs { data, metrics, out }),
        Command::Bench {
            table,
            seed,
            replications,
            n,
            eval_size,
            out,
            tuning,
        } => commands::bench(
            &cfg,
            commands::BenchArgs {
                table,
                seed,
                replications,
                n,
                eval_size,
                out,
                tuning: tuning.into(),
            },
        ),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("copreg: {e}");
        std::process::exit(e.code());
    }
}
