//! Reverse-mode differentiation over the handful of tensor ops the maze
//! Q-networks use, plus the AdamW optimizer and JSON checkpoints.

mod adamw;
mod checkpoint;
mod graph;
mod tensor;

pub use adamw::{AdamWConfig, AdamWState};
pub use checkpoint::{Checkpoint, NamedArray};
pub use graph::{eval, Graph, NodeId};
pub use tensor::{zero_grad, ParamId, Parameters, Tensor};

use thiserror::Error;

use crate::quantum::QuantumError;

#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint json: {0}")]
    Json(#[from] serde_json::Error),
}
