use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swarmkit::experiment::{load_config, run_experiment};
use swarmkit::problems::{brute_force_tsp, load_tsp_file};

#[derive(Parser)]
#[command(
    name = "swarmkit",
    version,
    about = "Seeded PSO / ACO experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of an experiment and write traces plus summary.json.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's `output` key).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Seeds run concurrently on this many threads.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Print the exact optimal tour of a small instance file.
    BruteForce { instance: PathBuf },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> swarmkit::Result<()> {
    match cli.command {
        Command::Run {
            config,
            output,
            workers,
        } => {
            let cfg = load_config(&config)?;
            let dir = output.unwrap_or_else(|| cfg.output_dir());
            let summary = run_experiment(&cfg, &dir, workers)?;
            println!(
                "{} runs -> {}: min {} median {} mean {}",
                summary.runs.len(),
                dir.display(),
                summary.min,
                summary.median,
                summary.mean
            );
        }
        Command::BruteForce { instance } => {
            let inst = load_tsp_file(&instance)?;
            let tour = brute_force_tsp(&inst)?;
            let order: Vec<String> = tour.order.iter().map(ToString::to_string).collect();
            println!("tour {}", order.join(" "));
            println!("length {}", tour.length);
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!("ok: {:?} with {} seeds", cfg.kind(), cfg.seeds.len());
        }
    }
    Ok(())
}
