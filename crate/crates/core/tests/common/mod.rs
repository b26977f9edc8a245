//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use qmaze::quantum::Gate;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn single_qubit(gate: &Gate) -> [[Complex64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match *gate {
        Gate::H(_) => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        Gate::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        Gate::Ry(_, t) => {
            let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]]
        }
        Gate::Rz(_, t) => [[Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)]],
        Gate::P(_, t) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, t)]],
        Gate::Cx { .. } => unreachable!("two-qubit gate"),
    }
}

/// Full `2^n x 2^n` matrix of one gate, qubit `q` being bit `q` of the basis index.
pub fn gate_matrix(gate: &Gate, n_qubits: usize) -> Matrix {
    let dim = 1 << n_qubits;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    match *gate {
        Gate::Cx { control, target } => {
            for j in 0..dim {
                let i = if j >> control & 1 == 1 { j ^ (1 << target) } else { j };
                m[i][j] = c(1.0, 0.0);
            }
        }
        Gate::H(q) | Gate::X(q) | Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::P(q, _) => {
            let u = single_qubit(gate);
            for i in 0..dim {
                for j in 0..dim {
                    if i & !(1 << q) == j & !(1 << q) {
                        m[i][j] = u[i >> q & 1][j >> q & 1];
                    }
                }
            }
        }
    }
    m
}

/// Product of gate matrices, first gate applied first.
pub fn circuit_matrix(gates: &[Gate], n_qubits: usize) -> Matrix {
    gates.iter().fold(identity(1 << n_qubits), |acc, g| matmul(&gate_matrix(g, n_qubits), &acc))
}

/// Measurement distribution of the circuit applied to `|0...0>`.
pub fn dense_probabilities(gates: &[Gate], n_qubits: usize) -> Vec<f64> {
    let u = circuit_matrix(gates, n_qubits);
    u.iter().map(|row| row[0].norm_sqr()).collect()
}

/// Central difference of a vector-valued `f` in every coordinate of `x`;
/// returns `d f_i / d x_j` as `out[i][j]`.
pub fn central_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let m = f(x).len();
    let mut out = vec![vec![0.0; x.len()]; m];
    for j in 0..x.len() {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for i in 0..m {
            out[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    out
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
