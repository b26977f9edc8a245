//! Parameterized circuit templates and the two stock builders used by the
//! maze network: a Z feature map and a real-amplitudes ansatz.

use std::fmt;

use super::statevector::Gate;
use super::QuantumError;

/// A symbolic parameter: either an input feature `x[i]` or a trainable weight `w[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Input(usize),
    Weight(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Input(i) => write!(f, "x{i}"),
            Slot::Weight(i) => write!(f, "w{i}"),
        }
    }
}

/// Rotation families that can carry a bound parameter. All of them have a
/// generator with eigenvalue gap 1, so the two-term shift rule is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    Ry,
    Rz,
    P,
}

impl Rotation {
    fn gate(self, qubit: usize, angle: f64) -> Gate {
        match self {
            Rotation::Ry => Gate::Ry(qubit, angle),
            Rotation::Rz => Gate::Rz(qubit, angle),
            Rotation::P => Gate::P(qubit, angle),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Rotation::Ry => "RY",
            Rotation::Rz => "RZ",
            Rotation::P => "P",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateTemplate {
    Fixed(Gate),
    /// Rotation whose angle is `scale * value(slot)`.
    Bound {
        rotation: Rotation,
        qubit: usize,
        slot: Slot,
        scale: f64,
    },
}

impl fmt::Display for GateTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateTemplate::Fixed(g) => write!(f, "{g}"),
            GateTemplate::Bound { rotation, qubit, slot, scale } => {
                write!(f, "{} {qubit} {slot}*{scale}", rotation.name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    gates: Vec<GateTemplate>,
    input_slots: usize,
    weight_slots: usize,
}

impl ParameterizedCircuit {
    /// Validates qubit indices and that every slot in `[0, input_slots)` and
    /// `[0, weight_slots)` is referenced by at least one gate.
    pub fn new(
        n_qubits: usize,
        gates: Vec<GateTemplate>,
        input_slots: usize,
        weight_slots: usize,
    ) -> Result<Self, QuantumError> {
        if n_qubits == 0 {
            return Err(QuantumError::InvalidCircuit("circuit needs at least one qubit".into()));
        }
        let mut used_inputs = vec![false; input_slots];
        let mut used_weights = vec![false; weight_slots];
        for g in &gates {
            match g {
                GateTemplate::Fixed(gate) => gate.validate(n_qubits)?,
                GateTemplate::Bound { qubit, slot, scale, .. } => {
                    if *qubit >= n_qubits {
                        return Err(QuantumError::InvalidGate(format!("{g} exceeds {n_qubits} qubits")));
                    }
                    if !scale.is_finite() {
                        return Err(QuantumError::InvalidGate(format!("{g} has a non-finite scale")));
                    }
                    let used = match *slot {
                        Slot::Input(i) => used_inputs.get_mut(i),
                        Slot::Weight(i) => used_weights.get_mut(i),
                    };
                    match used {
                        Some(u) => *u = true,
                        None => {
                            return Err(QuantumError::InvalidCircuit(format!("{g} references undeclared slot {slot}")))
                        }
                    }
                }
            }
        }
        if let Some(i) = used_inputs.iter().position(|u| !u) {
            return Err(QuantumError::InvalidCircuit(format!("input slot x{i} is never used")));
        }
        if let Some(i) = used_weights.iter().position(|u| !u) {
            return Err(QuantumError::InvalidCircuit(format!("weight slot w{i} is never used")));
        }
        Ok(Self { n_qubits, gates, input_slots, weight_slots })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateTemplate] {
        &self.gates
    }

    pub fn input_slots(&self) -> usize {
        self.input_slots
    }

    pub fn weight_slots(&self) -> usize {
        self.weight_slots
    }

    /// Gate positions and scale factors bound to `slot`.
    pub fn bindings(&self, slot: Slot) -> Vec<(usize, f64)> {
        self.gates
            .iter()
            .enumerate()
            .filter_map(|(pos, g)| match g {
                GateTemplate::Bound { slot: s, scale, .. } if *s == slot => Some((pos, *scale)),
                _ => None,
            })
            .collect()
    }

    /// Appends `other` after `self`. Slot counts are taken as the maximum of
    /// both, so a feature map (inputs only) composes with an ansatz (weights only).
    pub fn compose(&self, other: &ParameterizedCircuit) -> Result<Self, QuantumError> {
        if self.n_qubits != other.n_qubits {
            return Err(QuantumError::InvalidCircuit(format!(
                "cannot compose {}-qubit and {}-qubit circuits",
                self.n_qubits, other.n_qubits
            )));
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Self::new(
            self.n_qubits,
            gates,
            self.input_slots.max(other.input_slots),
            self.weight_slots.max(other.weight_slots),
        )
    }

    fn check_arity(&self, inputs: &[f64], weights: &[f64]) -> Result<(), QuantumError> {
        if inputs.len() != self.input_slots {
            return Err(QuantumError::Arity { what: "inputs", expected: self.input_slots, got: inputs.len() });
        }
        if weights.len() != self.weight_slots {
            return Err(QuantumError::Arity { what: "weights", expected: self.weight_slots, got: weights.len() });
        }
        Ok(())
    }

    /// Resolves every template to a concrete gate.
    pub fn bind(&self, inputs: &[f64], weights: &[f64]) -> Result<Vec<Gate>, QuantumError> {
        self.check_arity(inputs, weights)?;
        Ok(self.bind_unchecked(inputs, weights, None))
    }

    /// Like [`bind`](Self::bind) but adds `delta` to the angle of the gate at
    /// position `shift.0`. Arity must already have been checked.
    pub(crate) fn bind_unchecked(&self, inputs: &[f64], weights: &[f64], shift: Option<(usize, f64)>) -> Vec<Gate> {
        self.gates
            .iter()
            .enumerate()
            .map(|(pos, g)| match *g {
                GateTemplate::Fixed(gate) => gate,
                GateTemplate::Bound { rotation, qubit, slot, scale } => {
                    let value = match slot {
                        Slot::Input(i) => inputs[i],
                        Slot::Weight(i) => weights[i],
                    };
                    let mut angle = scale * value;
                    if let Some((p, delta)) = shift {
                        if p == pos {
                            angle += delta;
                        }
                    }
                    rotation.gate(qubit, angle)
                }
            })
            .collect()
    }

    pub(crate) fn validate_arity(&self, inputs: &[f64], weights: &[f64]) -> Result<(), QuantumError> {
        self.check_arity(inputs, weights)
    }

    /// Text dump, one gate per line: `KIND qubits [slot*scale | angle]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

/// Z feature map: each repetition applies `H` to every qubit followed by
/// `P(2 x_i)` on qubit `i`.
pub fn build_z_feature_map(n_qubits: usize, reps: usize) -> Result<ParameterizedCircuit, QuantumError> {
    if reps == 0 {
        return Err(QuantumError::InvalidCircuit("feature map needs reps >= 1".into()));
    }
    let mut gates = Vec::with_capacity(2 * n_qubits * reps);
    for _ in 0..reps {
        gates.extend((0..n_qubits).map(|q| GateTemplate::Fixed(Gate::H(q))));
        gates.extend((0..n_qubits).map(|q| GateTemplate::Bound {
            rotation: Rotation::P,
            qubit: q,
            slot: Slot::Input(q),
            scale: 2.0,
        }));
    }
    ParameterizedCircuit::new(n_qubits, gates, n_qubits, 0)
}

/// Real-amplitudes ansatz: `reps + 1` layers of `RY` (one weight per qubit
/// per layer, slot `layer * n_qubits + qubit`), with an optional linear `CX`
/// chain between consecutive layers.
pub fn build_real_amplitudes(
    n_qubits: usize,
    reps: usize,
    entangle: bool,
) -> Result<ParameterizedCircuit, QuantumError> {
    if reps == 0 {
        return Err(QuantumError::InvalidCircuit("ansatz needs reps >= 1".into()));
    }
    let mut gates = Vec::new();
    for layer in 0..=reps {
        if layer > 0 && entangle {
            gates.extend((0..n_qubits.saturating_sub(1)).map(|q| GateTemplate::Fixed(Gate::Cx { control: q, target: q + 1 })));
        }
        gates.extend((0..n_qubits).map(|q| GateTemplate::Bound {
            rotation: Rotation::Ry,
            qubit: q,
            slot: Slot::Weight(layer * n_qubits + q),
            scale: 1.0,
        }));
    }
    ParameterizedCircuit::new(n_qubits, gates, 0, n_qubits * (reps + 1))
}
