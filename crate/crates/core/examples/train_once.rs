//! Trains one network on a bundled maze and prints the outcome.
//!
//! `cargo run --release -p qmaze --example train_once -- <classical|hybrid> <N> <seed> [episodes]`

use qmaze::trainer::{evaluate_policy, train, TrainConfig};
use qmaze::{Architecture, Maze};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let arch = Architecture::parse(args.get(1).map_or("classical", String::as_str)).expect("architecture");
    let n: usize = args.get(2).map_or(4, |s| s.parse().expect("maze size"));
    let seed: u64 = args.get(3).map_or(1, |s| s.parse().expect("seed"));
    let maze = Maze::shipped(n).expect("bundled maze");
    let mut config = TrainConfig::for_maze_size(arch, n);
    if let Some(e) = args.get(4) {
        config = config.with_episodes(e.parse().expect("episodes"));
    }
    config.seed = seed;
    let (net, report) = train(&config, &maze).expect("training");
    let eval = evaluate_policy(&net, &maze).expect("evaluation");
    let steps: usize = report.records.iter().map(|r| r.steps).sum();
    println!(
        "{arch} N={n} seed={seed}: win rate {:.2}%, {:.2}s, {steps} steps, greedy success {:.2}",
        report.win_rate_pct, report.train_seconds, eval.success_fraction
    );
    print!("{}", eval.render(&maze));
}
