//! Training history and its CSV / JSON exports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{TrainConfig, TrainError};

pub const HISTORY_HEADER: &str = "episode,reward,steps,epsilon,win,ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub reward: f64,
    pub steps: usize,
    pub epsilon: f64,
    pub win: bool,
    /// Wall-clock duration of the episode in milliseconds.
    pub ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub records: Vec<EpisodeRecord>,
    pub win_rate_pct: f64,
    pub train_seconds: f64,
    pub model_size: usize,
}

/// `100 * wins / episodes`, or 0 for an empty history.
pub fn win_rate_of(wins: usize, episodes: usize) -> f64 {
    if episodes == 0 {
        0.0
    } else {
        100.0 * wins as f64 / episodes as f64
    }
}

/// Win rate of a report recomputed from its per-episode flags.
pub fn win_rate(report: &TrainReport) -> f64 {
    win_rate_of(report.records.iter().filter(|r| r.win).count(), report.records.len())
}

impl TrainReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.records.len() + 1));
        out.push_str(HISTORY_HEADER);
        out.push('\n');
        for r in &self.records {
            writeln!(out, "{},{},{},{},{},{:.3}", r.episode, r.reward, r.steps, r.epsilon, u8::from(r.win), r.ms)
                .expect("writing to a String");
        }
        out
    }

    pub fn summary(&self, config: &TrainConfig, maze: &str) -> Summary {
        Summary {
            model: config.architecture.id().to_string(),
            maze: maze.to_string(),
            total_params: self.model_size,
            win_rate_pct: self.win_rate_pct,
            train_seconds: self.train_seconds,
            seed: config.seed,
            config: config.clone(),
        }
    }
}

/// Parses a history CSV written by [`TrainReport::to_csv`].
pub fn parse_history_csv(text: &str) -> Result<Vec<EpisodeRecord>, TrainError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HISTORY_HEADER => {}
        other => return Err(TrainError::History(format!("expected header {HISTORY_HEADER:?}, found {other:?}"))),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |what: &str| TrainError::History(format!("line {}: bad {what} in {line:?}", i + 2));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad("field count"));
        }
        let win = match fields[4].trim() {
            "0" => false,
            "1" => true,
            _ => return Err(bad("win flag")),
        };
        records.push(EpisodeRecord {
            episode: fields[0].trim().parse().map_err(|_| bad("episode"))?,
            reward: fields[1].trim().parse().map_err(|_| bad("reward"))?,
            steps: fields[2].trim().parse().map_err(|_| bad("steps"))?,
            epsilon: fields[3].trim().parse().map_err(|_| bad("epsilon"))?,
            win,
            ms: fields[5].trim().parse().map_err(|_| bad("ms"))?,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub model: String,
    pub maze: String,
    pub total_params: usize,
    pub win_rate_pct: f64,
    pub train_seconds: f64,
    pub seed: u64,
    pub config: TrainConfig,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
