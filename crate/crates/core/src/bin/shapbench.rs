use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oddshap::bench::{
    ablate_interactions, ablation_csv, ablation_medians, ground_truth, results_csv, run_experiment,
    run_single, summarize, summary_csv, truth_csv, write_text, EstimatorEntry, ExperimentConfig,
    GameSpec, RunOptions,
};
use oddshap::estimators::Estimator;
use oddshap::Result;

#[derive(Parser)]
#[command(
    name = "shapbench",
    version,
    about = "Shapley value estimation benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Shapley values of a game.
    Truth {
        #[arg(long)]
        game: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One estimator run.
    Estimate(EstimateArgs),
    /// Every (estimator, budget, seed) cell of an experiment file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append per-player `phi_1..phi_d` columns.
        #[arg(long)]
        emit_values: bool,
        /// Write zero runtimes so repeated runs give identical files.
        #[arg(long)]
        no_timing: bool,
        /// Also write median/IQR per (estimator, budget) here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// MSE ratio of OddSHAP to LeverageSHAP against the interaction count.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    game: String,
    #[arg(long)]
    estimator: Estimator,
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample coalitions without complement pairing.
    #[arg(long)]
    unpaired: bool,
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let game = args.game.parse::<GameSpec>()?.build()?;
    let truth = ground_truth(game.as_ref()).ok();
    let entry = EstimatorEntry {
        name: args.estimator,
        eta: args.eta,
        order: args.order,
        paired: args.unpaired.then_some(false),
    };
    let opts = RunOptions {
        timing: !args.no_timing,
    };
    let row = run_single(
        &game,
        &args.game,
        &entry,
        args.budget,
        args.seed,
        truth.as_deref(),
        opts,
    )?;
    emit(args.out.as_ref(), &results_csv(&[row], true)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Truth { game, out } => {
            let game = game.parse::<GameSpec>()?.build()?;
            emit(out.as_ref(), &truth_csv(&ground_truth(game.as_ref())?))
        }
        Command::Estimate(args) => estimate(args),
        Command::Bench {
            config,
            out,
            emit_values,
            no_timing,
            summary,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = run_experiment(&cfg, RunOptions { timing: !no_timing })?;
            let cells = summarize(&rows);
            for s in &cells {
                eprintln!(
                    "{:<24} m={:<7} median={:.4e} iqr=[{:.4e}, {:.4e}]",
                    s.estimator, s.m, s.median, s.q1, s.q3
                );
            }
            if let Some(path) = summary {
                write_text(path, &summary_csv(&cells)?)?;
            }
            emit(
                out.or(cfg.output).as_ref(),
                &results_csv(&rows, emit_values)?,
            )
        }
        Command::Ablate {
            config,
            counts,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = ablate_interactions(&cfg, &counts)?;
            for (m, count, ratio) in ablation_medians(&rows) {
                eprintln!("m={m:<7} count={count:<6} median ratio={ratio:.4}");
            }
            emit(out.or(cfg.output).as_ref(), &ablation_csv(&rows)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shapbench: {e}");
            ExitCode::FAILURE
        }
    }
}
