use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmaze::autodiff::Checkpoint;
use qmaze::env::EnvError;
use qmaze::trainer::{evaluate_policy, parse_history_csv, train, TrainError, TrainReport};
use qmaze::{Architecture, Maze, QNetwork, TrainConfig};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::plot;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn maze_error(path: &Path, e: EnvError) -> CliError {
    match e {
        EnvError::Unsolvable { .. } => CliError::Domain(format!("{}: {e}", path.display())),
        _ => CliError::Config(format!("{}: {e}", path.display())),
    }
}

/// Loads a maze file, or the built-in 4x4 maze when `path` is `None`.
/// Returns the maze and the label used in summaries.
pub fn load_maze(path: Option<&Path>) -> Result<(Maze, String), CliError> {
    match path {
        None => Ok((Maze::shipped(4).expect("built-in maze"), "builtin:maze4".into())),
        Some(p) => {
            let text = read(p)?;
            let maze = Maze::parse(&text).map_err(|e| maze_error(p, e))?;
            Ok((maze, p.display().to_string()))
        }
    }
}

fn train_error(e: TrainError) -> CliError {
    match e {
        TrainError::Config(m) => CliError::Config(m),
        TrainError::Env(e @ EnvError::Unsolvable { .. }) => CliError::Domain(e.to_string()),
        other => CliError::Domain(other.to_string()),
    }
}

pub struct TrainArgs {
    pub config: RunConfig,
    pub out: PathBuf,
}

/// Trains one model and writes `model.json`, `history.csv` and
/// `summary.json` into the output directory.
pub fn cmd_train(args: &TrainArgs) -> Result<String, CliError> {
    let (maze, label) = load_maze(args.config.maze.as_deref())?;
    let config = args.config.train_config(maze.size());
    config.validate().map_err(train_error)?;
    let (net, report) = train(&config, &maze).map_err(train_error)?;
    let checkpoint = Checkpoint::capture(config.architecture.id(), maze.size(), net.params(), None);
    let json = checkpoint.to_json().map_err(|e| CliError::Domain(e.to_string()))?;
    write(&args.out.join("model.json"), &json)?;
    write(&args.out.join("history.csv"), &report.to_csv())?;
    write(&args.out.join("summary.json"), &(report.summary(&config, &label).to_json() + "\n"))?;
    Ok(format!(
        "{} on {label}: {} params, win rate {:.2}%, {:.2} s; wrote {}\n",
        config.architecture.display_name(),
        report.model_size,
        report.win_rate_pct,
        report.train_seconds,
        args.out.display()
    ))
}

/// Restores a network from a checkpoint for `maze`.
pub fn load_network(checkpoint: &Path, maze: &Maze) -> Result<QNetwork, CliError> {
    let text = read(checkpoint)?;
    let ck = Checkpoint::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: not a model checkpoint: {e}", checkpoint.display())))?;
    let arch = Architecture::parse(&ck.architecture)
        .ok_or_else(|| CliError::Domain(format!("unknown architecture {:?} in checkpoint", ck.architecture)))?;
    if ck.maze_size != maze.size() {
        return Err(CliError::Domain(format!(
            "checkpoint was trained on a {0}x{0} maze, got a {1}x{1} maze",
            ck.maze_size,
            maze.size()
        )));
    }
    let mut net = QNetwork::build(arch, ck.maze_size, 0).map_err(|e| CliError::Domain(e.to_string()))?;
    ck.restore_into(net.params_mut()).map_err(|e| CliError::Domain(format!("incompatible checkpoint: {e}")))?;
    Ok(net)
}

/// Greedy-policy report: success fraction then the arrow map.
pub fn cmd_eval(checkpoint: &Path, maze_path: &Path, output: Option<&Path>) -> Result<String, CliError> {
    let (maze, _) = load_maze(Some(maze_path))?;
    let net = load_network(checkpoint, &maze)?;
    let eval = evaluate_policy(&net, &maze).map_err(train_error)?;
    let text = format!("success {:.2}\n{}", eval.success_fraction, eval.render(&maze));
    if let Some(path) = output {
        write(path, &text)?;
    }
    Ok(text)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn fmt_stat(values: &[f64], digits: usize, unit: &str) -> String {
    let (m, s) = mean_std(values);
    if values.len() < 2 {
        format!("{m:.digits$}{unit}")
    } else {
        format!("{m:.digits$} ± {s:.digits$}{unit}")
    }
}

pub struct BenchmarkArgs {
    pub maze_size: usize,
    pub models: Vec<Architecture>,
    pub seeds: Vec<u64>,
    pub config: RunConfig,
    pub out: PathBuf,
}

/// Trains every (model, seed) pair on a built-in maze and tabulates model
/// size, win rate and training runtime (mean ± sample std over seeds).
pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<String, CliError> {
    if args.models.is_empty() {
        return Err(CliError::Config("benchmark needs at least one model".into()));
    }
    if args.seeds.is_empty() {
        return Err(CliError::Config("benchmark needs at least one seed".into()));
    }
    let maze = Maze::shipped(args.maze_size)
        .ok_or_else(|| CliError::Config(format!("no built-in maze of size {} (use 3, 4 or 5)", args.maze_size)))?;
    let mut table = String::from("| Model | Model Size | Win Rate | Training Runtime |\n|---|---|---|---|\n");
    for &arch in &args.models {
        let mut cfg = args.config.clone();
        cfg.model = Some(arch);
        let (mut rates, mut secs, mut size) = (Vec::new(), Vec::new(), 0);
        for &seed in &args.seeds {
            cfg.seed = Some(seed);
            let config: TrainConfig = cfg.train_config(maze.size());
            let (_, report): (_, TrainReport) = train(&config, &maze).map_err(train_error)?;
            write(&args.out.join(format!("{}-seed{seed}.csv", arch.id())), &report.to_csv())?;
            rates.push(report.win_rate_pct);
            secs.push(report.train_seconds);
            size = report.model_size;
        }
        writeln!(
            table,
            "| {} | {size} | {} | {} |",
            arch.display_name(),
            fmt_stat(&rates, 2, "%"),
            fmt_stat(&secs, 2, " s")
        )
        .expect("writing to a String");
    }
    write(&args.out.join("benchmark.md"), &table)?;
    Ok(table)
}

/// Writes `<stem>-epsilon.svg` and `<stem>-reward.svg` per history file.
pub fn cmd_plot(histories: &[PathBuf], out: &Path) -> Result<String, CliError> {
    if histories.is_empty() {
        return Err(CliError::Config("plot needs at least one history CSV".into()));
    }
    let mut written = String::new();
    for path in histories {
        let records = parse_history_csv(&read(path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let stem = path.file_stem().map_or("history".into(), |s| s.to_string_lossy().into_owned());
        let episodes: Vec<f64> = records.iter().map(|r| r.episode as f64).collect();
        let charts = [
            ("epsilon", "Epsilon profile", "epsilon", records.iter().map(|r| r.epsilon).collect::<Vec<_>>()),
            ("reward", "Reward history", "total reward", records.iter().map(|r| r.reward).collect()),
        ];
        for (suffix, title, ylabel, ys) in charts {
            let svg = plot::line_chart(&format!("{title}: {stem}"), "episode", ylabel, &episodes, &ys);
            let target = out.join(format!("{stem}-{suffix}.svg"));
            write(&target, &svg)?;
            writeln!(written, "wrote {}", target.display()).expect("writing to a String");
        }
    }
    Ok(written)
}
