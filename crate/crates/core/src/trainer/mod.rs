//! DQN training, policy evaluation, win-rate metrics and the tabular oracle.

mod dqn;
mod evaluate;
mod report;
mod tabular;

pub use dqn::{q_loss, train, DqnTrainer, QLoss, TrainConfig};
pub use evaluate::{evaluate_policy, PolicyEvaluation, QFunction};
pub use report::{parse_history_csv, win_rate, win_rate_of, EpisodeRecord, Summary, TrainReport, HISTORY_HEADER};
pub use tabular::{tabular_q_learn, TabularConfig, TabularQ};

use thiserror::Error;

use crate::agent::AgentError;
use crate::env::EnvError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("malformed history: {0}")]
    History(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
}
