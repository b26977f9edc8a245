mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmaze::Architecture;

use commands::{BenchmarkArgs, TrainArgs};
use config::RunConfig;
use error::CliError;

/// Deep Q-learning on grid mazes with classical and hybrid quantum-classical networks
#[derive(Parser, Debug)]
#[command(name = "qmaze", version, about)]
struct Cli {
    /// Run configuration file (`key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Random seed; overrides the config file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config file [default: out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one model and write model.json, history.csv and summary.json
    Train {
        /// Maze file; overrides the config file
        #[arg(long)]
        maze: Option<PathBuf>,
        /// classical or hybrid; overrides the config file
        #[arg(long)]
        model: Option<String>,
        /// Number of training episodes; overrides the config file
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Evaluate a trained checkpoint's greedy policy on a maze
    Eval {
        checkpoint: PathBuf,
        maze: PathBuf,
        /// Also write the report to this file
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train several models and seeds on a built-in maze and tabulate results
    Benchmark {
        #[arg(long, default_value_t = 4)]
        maze_size: usize,
        /// Comma-separated models (classical, hybrid)
        #[arg(long, value_delimiter = ',', default_value = "classical,hybrid")]
        models: Vec<String>,
        /// Comma-separated seeds
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
    },
    /// Render epsilon and reward charts (SVG) from history CSV files
    Plot {
        #[arg(required = true)]
        histories: Vec<PathBuf>,
    },
}

fn parse_model(name: &str) -> Result<Architecture, CliError> {
    Architecture::parse(name).ok_or_else(|| CliError::Config(format!("unknown model {name:?} (use classical or hybrid)")))
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    let out = cli.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Train { maze, model, episodes } => {
            if maze.is_some() {
                config.maze = maze;
            }
            if let Some(m) = model {
                config.model = Some(parse_model(&m)?);
            }
            if episodes.is_some() {
                config.episodes = episodes;
            }
            commands::cmd_train(&TrainArgs { config, out })
        }
        Command::Eval { checkpoint, maze, output } => commands::cmd_eval(&checkpoint, &maze, output.as_deref()),
        Command::Benchmark { maze_size, models, seeds } => {
            let models = models
                .iter()
                .map(|m| m.trim())
                .filter(|m| !m.is_empty())
                .map(parse_model)
                .collect::<Result<Vec<_>, _>>()?;
            commands::cmd_benchmark(&BenchmarkArgs { maze_size, models, seeds, config, out })
        }
        Command::Plot { histories } => commands::cmd_plot(&histories, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
