//! Dense statevector over `n` qubits.
//!
//! Basis ordering is little-endian: bit `i` of a basis index is the value of
//! qubit `i`. Index 1 on two qubits is qubit 0 = 1, qubit 1 = 0.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use super::QuantumError;

/// Concrete gate from the supported alphabet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Ry(usize, f64),
    Rz(usize, f64),
    P(usize, f64),
    Cx { control: usize, target: usize },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Ry(..) => "RY",
            Gate::Rz(..) => "RZ",
            Gate::P(..) => "P",
            Gate::Cx { .. } => "CX",
        }
    }

    /// Qubits the gate acts on; for `Cx` this is `[control, target]`.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::P(q, _) => vec![q],
            Gate::Cx { control, target } => vec![control, target],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::P(_, a) => Some(a),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, n_qubits: usize) -> Result<(), QuantumError> {
        let qubits = self.qubits();
        if let Some(&q) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(QuantumError::InvalidGate(format!(
                "{} targets qubit {q} on a {n_qubits}-qubit register",
                self.name()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(QuantumError::InvalidGate(format!(
                "CX control and target are both qubit {}",
                qubits[0]
            )));
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(QuantumError::InvalidGate(format!(
                    "{} angle {a} is not finite",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    /// 2x2 unitary for single-qubit gates, row-major.
    fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let m = match *self {
            Gate::H(_) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::X(_) => [[zero, one], [one, zero]],
            Gate::Ry(_, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            Gate::Rz(_, theta) => [
                [Complex64::from_polar(1.0, -theta / 2.0), zero],
                [zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            Gate::P(_, phi) => [[one, zero], [zero, Complex64::from_polar(1.0, phi)]],
            Gate::Cx { .. } => return None,
        };
        Some(m)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cx { control, target } => write!(f, "CX {control} {target}"),
            Gate::H(q) | Gate::X(q) => write!(f, "{} {q}", self.name()),
            Gate::Ry(q, a) | Gate::Rz(q, a) | Gate::P(q, a) => write!(f, "{} {q} {a}", self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self, QuantumError> {
        if n_qubits == 0 {
            return Err(QuantumError::InvalidCircuit("register needs at least one qubit".into()));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Builds a state from raw amplitudes. The vector must have length
    /// `2^n_qubits` and unit norm (within 1e-10).
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if n_qubits == 0 || amplitudes.len() != 1 << n_qubits {
            return Err(QuantumError::InvalidCircuit(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let state = Self { n_qubits, amplitudes };
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(QuantumError::InvalidCircuit(format!("state norm {} is not 1", state.norm())));
        }
        Ok(state)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QuantumError> {
        let mut state = Self::zero(n_qubits)?;
        if index >= state.amplitudes.len() {
            return Err(QuantumError::InvalidCircuit(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Born-rule probabilities, indexed little-endian.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), QuantumError> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Cx { control, target } => {
                let (cmask, tmask) = (1usize << control, 1usize << target);
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
            _ => {
                let q = gate.qubits()[0];
                let m = gate.single_qubit_matrix().expect("single-qubit gate");
                let mask = 1usize << q;
                for i in 0..self.amplitudes.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
                        self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                        self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Returns `U * state` for the unitary of `gate`.
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector, QuantumError> {
    state.apply(gate)?;
    Ok(state)
}
