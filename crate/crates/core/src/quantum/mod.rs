//! Exact statevector simulation of small parameterized circuits.

mod circuit;
mod qnn;
mod statevector;

pub use circuit::{build_real_amplitudes, build_z_feature_map, GateTemplate, ParameterizedCircuit, Rotation, Slot};
pub use qnn::{parameter_shift_jacobians, qnn_forward, Jacobian, SamplerQnn};
pub use statevector::{apply_gate, Gate, StateVector};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("expected {expected} {what}, got {got}")]
    Arity { what: &'static str, expected: usize, got: usize },
    #[error("shots must be at least 1")]
    InvalidShots,
}
