//! Q-networks, action selection, exploration schedule and experience replay.

mod epsilon;
mod network;
mod replay;

pub use epsilon::EpsilonSchedule;
pub use network::{
    build_classical_cnn, build_hybrid_qnn, default_kernel, Architecture, LayerSummary, QNetwork, FEATURE_MAP_REPS,
};
pub use replay::{ReplayBuffer, Transition};

use rand::Rng;
use thiserror::Error;

use crate::autodiff::AutodiffError;
use crate::env::{Action, Observation};
use crate::quantum::QuantumError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("replay buffer holds {available} transitions, {requested} requested")]
    InsufficientData { requested: usize, available: usize },
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
}

impl From<QuantumError> for AgentError {
    fn from(e: QuantumError) -> Self {
        AgentError::Autodiff(e.into())
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64; 4]) -> Action {
    let mut best = 0;
    for i in 1..4 {
        if values[i] > values[best] {
            best = i;
        }
    }
    Action::from_index(best).expect("index < 4")
}

/// Epsilon-greedy choice: uniform random action with probability `epsilon`,
/// otherwise the greedy action under `net`.
pub fn select_action<R: Rng + ?Sized>(
    net: &QNetwork,
    obs: &Observation,
    epsilon: f64,
    rng: &mut R,
) -> Result<Action, AgentError> {
    if rng.gen::<f64>() < epsilon {
        return Ok(Action::ALL[rng.gen_range(0..4)]);
    }
    Ok(argmax(&net.q_values(obs)?))
}
