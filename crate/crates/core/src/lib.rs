//! Hybrid quantum-classical deep Q-learning on grid mazes.
//!
//! * [`quantum`]: statevector simulator, parameterized circuits and the
//!   sampler QNN with parameter-shift Jacobians.
//! * [`autodiff`]: reverse-mode tensor graph, AdamW, checkpoints.
//! * [`env`]: the maze MDP and maze file format.
//! * [`agent`]: classical and hybrid Q-networks, epsilon-greedy policy,
//!   replay buffer.
//! * [`trainer`]: DQN loop, evaluation, win rate, tabular Q-learning.

pub mod agent;
pub mod autodiff;
pub mod env;
pub mod quantum;
pub mod trainer;

pub use agent::{Architecture, QNetwork};
pub use env::{Action, Cell, Maze};
pub use trainer::{train, TrainConfig, TrainReport};
