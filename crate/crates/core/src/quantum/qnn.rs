//! Sampler QNN: the circuit's output is its full measurement distribution.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::{build_real_amplitudes, build_z_feature_map, ParameterizedCircuit, Slot};
use super::statevector::StateVector;
use super::QuantumError;

/// Row-major `rows x cols` matrix of partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Jacobian {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// `upstream^T * J`, i.e. the vector-Jacobian product.
    pub fn vjp(&self, upstream: &[f64]) -> Vec<f64> {
        debug_assert_eq!(upstream.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, u) in upstream.iter().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, j) in out.iter_mut().zip(row) {
                *o += u * j;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerQnn {
    circuit: ParameterizedCircuit,
}

impl SamplerQnn {
    pub fn new(circuit: ParameterizedCircuit) -> Self {
        Self { circuit }
    }

    /// Two-qubit layer used by the hybrid maze network: Z feature map with
    /// `feature_reps` repetitions followed by a one-repetition real-amplitudes
    /// ansatz without entanglement. 2 inputs, 4 weights, 4 outputs.
    pub fn maze_layer(feature_reps: usize) -> Result<Self, QuantumError> {
        let fm = build_z_feature_map(2, feature_reps)?;
        let ansatz = build_real_amplitudes(2, 1, false)?;
        Ok(Self::new(fm.compose(&ansatz)?))
    }

    pub fn circuit(&self) -> &ParameterizedCircuit {
        &self.circuit
    }

    pub fn n_inputs(&self) -> usize {
        self.circuit.input_slots()
    }

    pub fn n_weights(&self) -> usize {
        self.circuit.weight_slots()
    }

    pub fn n_outputs(&self) -> usize {
        1 << self.circuit.n_qubits()
    }

    fn run(&self, inputs: &[f64], weights: &[f64], shift: Option<(usize, f64)>) -> Vec<f64> {
        let mut state = StateVector::zero(self.circuit.n_qubits()).expect("circuit has qubits");
        for gate in self.circuit.bind_unchecked(inputs, weights, shift) {
            // Gates were validated when the circuit was built; angles can only
            // go non-finite through the caller's values.
            state.apply(&gate).expect("validated gate");
        }
        state.probabilities()
    }

    fn check(&self, inputs: &[f64], weights: &[f64]) -> Result<(), QuantumError> {
        self.circuit.validate_arity(inputs, weights)?;
        if let Some(v) = inputs.iter().chain(weights).find(|v| !v.is_finite()) {
            return Err(QuantumError::InvalidGate(format!("parameter value {v} is not finite")));
        }
        Ok(())
    }

    /// Measurement distribution over the `2^n` basis states. Entry `k`
    /// corresponds to the basis state whose bit `i` is qubit `i`
    /// (little-endian).
    pub fn forward(&self, inputs: &[f64], weights: &[f64]) -> Result<Vec<f64>, QuantumError> {
        self.check(inputs, weights)?;
        Ok(self.run(inputs, weights, None))
    }

    /// Exact Jacobians of the output distribution with respect to the inputs
    /// (`n_outputs x n_inputs`) and weights (`n_outputs x n_weights`) by the
    /// two-term parameter-shift rule. A slot bound to several gates sums the
    /// per-gate shifts, each weighted by its binding scale.
    pub fn jacobians(&self, inputs: &[f64], weights: &[f64]) -> Result<(Jacobian, Jacobian), QuantumError> {
        self.check(inputs, weights)?;
        let mut jx = Jacobian::zeros(self.n_outputs(), self.n_inputs());
        let mut jw = Jacobian::zeros(self.n_outputs(), self.n_weights());
        for (slot, jac, col) in (0..self.n_inputs())
            .map(|i| (Slot::Input(i), true, i))
            .chain((0..self.n_weights()).map(|i| (Slot::Weight(i), false, i)))
        {
            let target = if jac { &mut jx } else { &mut jw };
            for (pos, scale) in self.circuit.bindings(slot) {
                let plus = self.run(inputs, weights, Some((pos, FRAC_PI_2)));
                let minus = self.run(inputs, weights, Some((pos, -FRAC_PI_2)));
                for k in 0..target.rows {
                    target.data[k * target.cols + col] += scale * 0.5 * (plus[k] - minus[k]);
                }
            }
        }
        Ok((jx, jw))
    }

    /// Draws `shots` samples from the output distribution. Only outcomes
    /// observed at least once appear in the map.
    pub fn sample_counts(
        &self,
        inputs: &[f64],
        weights: &[f64],
        shots: u64,
        seed: u64,
    ) -> Result<BTreeMap<usize, u64>, QuantumError> {
        if shots == 0 {
            return Err(QuantumError::InvalidShots);
        }
        let probs = self.forward(inputs, weights)?;
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * acc;
            let k = cdf.iter().position(|&c| u < c).unwrap_or(last_nonzero);
            *counts.entry(k).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Free-function form of [`SamplerQnn::forward`].
pub fn qnn_forward(qnn: &SamplerQnn, inputs: &[f64], weights: &[f64]) -> Result<Vec<f64>, QuantumError> {
    qnn.forward(inputs, weights)
}

/// Free-function form of [`SamplerQnn::jacobians`].
pub fn parameter_shift_jacobians(
    qnn: &SamplerQnn,
    inputs: &[f64],
    weights: &[f64],
) -> Result<(Jacobian, Jacobian), QuantumError> {
    qnn.jacobians(inputs, weights)
}
