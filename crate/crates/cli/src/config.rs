//! Run configuration files: flat `key = value` lines, `#` starts a comment.
//!
//! Recognised keys (all optional):
//!
//! | key | default |
//! |-----|---------|
//! | `model` | `classical` (`classical` or `hybrid`) |
//! | `maze` | built-in 4x4 maze |
//! | `out` | `out` |
//! | `seed` | `0` |
//! | `episodes` | 1000 for N <= 4, else 2000 |
//! | `max_steps_per_episode` | `4 N²` |
//! | `batch_size` | `32` |
//! | `gamma` | `0.95` |
//! | `replay_capacity` | `10 N⁴` |
//! | `target_sync_interval` | `10` |
//! | `lr`, `beta1`, `beta2`, `eps`, `weight_decay` | `1e-3`, `0.9`, `0.999`, `1e-8`, `1e-2` |
//! | `epsilon_start`, `epsilon_end`, `epsilon_tau` | `1.0`, `0.05`, `episodes / 5` |
//! | `record_timing` | `true` |
//!
//! Relative `maze` paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmaze::agent::EpsilonSchedule;
use qmaze::{Architecture, TrainConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub model: Option<Architecture>,
    pub maze: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub episodes: Option<usize>,
    pub max_steps_per_episode: Option<usize>,
    pub batch_size: Option<usize>,
    pub gamma: Option<f64>,
    pub replay_capacity: Option<usize>,
    pub target_sync_interval: Option<usize>,
    pub lr: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub eps: Option<f64>,
    pub weight_decay: Option<f64>,
    pub epsilon_start: Option<f64>,
    pub epsilon_end: Option<f64>,
    pub epsilon_tau: Option<f64>,
    pub record_timing: Option<bool>,
}

fn value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<Option<T>, CliError> {
    raw.parse()
        .map(Some)
        .map_err(|_| CliError::Config(format!("line {line}: invalid value {raw:?} for `{key}`")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Config(format!("line {line_no}: expected `key = value`, got {line:?}")))?;
            if seen.contains(&key.to_string()) {
                return Err(CliError::Config(format!("line {line_no}: duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            match key {
                "model" => {
                    cfg.model = Some(Architecture::parse(raw).ok_or_else(|| {
                        CliError::Config(format!("line {line_no}: unknown model {raw:?} (use classical or hybrid)"))
                    })?)
                }
                "maze" => cfg.maze = Some(PathBuf::from(raw)),
                "out" => cfg.out = Some(PathBuf::from(raw)),
                "seed" => cfg.seed = value(key, raw, line_no)?,
                "episodes" => cfg.episodes = value(key, raw, line_no)?,
                "max_steps_per_episode" => cfg.max_steps_per_episode = value(key, raw, line_no)?,
                "batch_size" => cfg.batch_size = value(key, raw, line_no)?,
                "gamma" => cfg.gamma = value(key, raw, line_no)?,
                "replay_capacity" => cfg.replay_capacity = value(key, raw, line_no)?,
                "target_sync_interval" => cfg.target_sync_interval = value(key, raw, line_no)?,
                "lr" => cfg.lr = value(key, raw, line_no)?,
                "beta1" => cfg.beta1 = value(key, raw, line_no)?,
                "beta2" => cfg.beta2 = value(key, raw, line_no)?,
                "eps" => cfg.eps = value(key, raw, line_no)?,
                "weight_decay" => cfg.weight_decay = value(key, raw, line_no)?,
                "epsilon_start" => cfg.epsilon_start = value(key, raw, line_no)?,
                "epsilon_end" => cfg.epsilon_end = value(key, raw, line_no)?,
                "epsilon_tau" => cfg.epsilon_tau = value(key, raw, line_no)?,
                "record_timing" => cfg.record_timing = value(key, raw, line_no)?,
                _ => return Err(CliError::Config(format!("line {line_no}: unknown key `{key}`"))),
            }
        }
        Ok(cfg)
    }

    /// Reads a config file; a relative `maze` path is made relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let (Some(maze), Some(dir)) = (&cfg.maze, path.parent()) {
            if maze.is_relative() {
                cfg.maze = Some(dir.join(maze));
            }
        }
        Ok(cfg)
    }

    /// Training configuration for a maze of side `n`; unset keys take the
    /// size-scaled defaults.
    pub fn train_config(&self, n: usize) -> TrainConfig {
        let arch = self.model.unwrap_or(Architecture::ClassicalCnn);
        let mut c = TrainConfig::for_maze_size(arch, n);
        if let Some(e) = self.episodes {
            c = c.with_episodes(e);
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.gamma, self.gamma);
        set(&mut c.optimizer.lr, self.lr);
        set(&mut c.optimizer.beta1, self.beta1);
        set(&mut c.optimizer.beta2, self.beta2);
        set(&mut c.optimizer.eps, self.eps);
        set(&mut c.optimizer.weight_decay, self.weight_decay);
        let EpsilonSchedule { mut start, mut end, mut tau } = c.epsilon;
        set(&mut start, self.epsilon_start);
        set(&mut end, self.epsilon_end);
        set(&mut tau, self.epsilon_tau);
        c.epsilon = EpsilonSchedule { start, end, tau };
        c.max_steps_per_episode = self.max_steps_per_episode.unwrap_or(c.max_steps_per_episode);
        c.batch_size = self.batch_size.unwrap_or(c.batch_size);
        c.replay_capacity = self.replay_capacity.unwrap_or(c.replay_capacity);
        c.target_sync_interval = self.target_sync_interval.unwrap_or(c.target_sync_interval);
        c.seed = self.seed.unwrap_or(c.seed);
        c.record_timing = self.record_timing.unwrap_or(c.record_timing);
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = RunConfig::parse("# run\nmodel = hybrid\nepisodes = 50 # short\n\nseed=3\nrecord_timing = false\n").unwrap();
        assert_eq!(cfg.model, Some(Architecture::HybridQnn));
        assert_eq!(cfg.episodes, Some(50));
        assert_eq!(cfg.seed, Some(3));
        let t = cfg.train_config(4);
        assert_eq!(t.episodes, 50);
        assert_eq!(t.epsilon.tau, 10.0);
        assert!(!t.record_timing);
        assert_eq!(t.batch_size, 32);
    }

    #[test]
    fn defaults_follow_maze_size() {
        let t = RunConfig::default().train_config(5);
        assert_eq!((t.episodes, t.max_steps_per_episode, t.replay_capacity), (2000, 100, 6250));
        assert_eq!(t.architecture, Architecture::ClassicalCnn);
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in ["colour = red", "episodes = many", "model = quantum", "episodes", "seed = 1\nseed = 2"] {
            assert!(matches!(RunConfig::parse(bad), Err(CliError::Config(_))), "{bad}");
        }
    }
}
