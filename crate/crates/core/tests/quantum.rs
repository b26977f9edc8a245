mod common;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use qmaze::quantum::{
    apply_gate, build_real_amplitudes, parameter_shift_jacobians, qnn_forward, Gate, SamplerQnn, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{central_jacobian, circuit_matrix, dense_probabilities};

fn random_gate(rng: &mut impl Rng) -> Gate {
    let q = rng.gen_range(0..2);
    let t = rng.gen_range(-TAU..TAU);
    match rng.gen_range(0..6) {
        0 => Gate::H(q),
        1 => Gate::X(q),
        2 => Gate::Ry(q, t),
        3 => Gate::Rz(q, t),
        4 => Gate::P(q, t),
        _ => Gate::Cx { control: q, target: 1 - q },
    }
}

#[test]
fn simulator_matches_dense_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let len = rng.gen_range(1..=8);
        let gates: Vec<Gate> = (0..len).map(|_| random_gate(&mut rng)).collect();
        let start = rng.gen_range(0..4);
        let mut state = StateVector::basis(2, start).unwrap();
        for g in &gates {
            state = apply_gate(state, g).unwrap();
        }
        let u = circuit_matrix(&gates, 2);
        for (i, a) in state.amplitudes().iter().enumerate() {
            assert!((a - u[i][start]).norm() < 1e-12, "gates {gates:?}");
        }
    }
}

#[test]
fn qnn_matches_dense_oracle() {
    let qnn = SamplerQnn::maze_layer(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-PI..PI)).collect();
        let w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..TAU)).collect();
        let gates = qnn.circuit().bind(&x, &w).unwrap();
        let oracle = dense_probabilities(&gates, 2);
        let got = qnn_forward(&qnn, &x, &w).unwrap();
        for (a, b) in got.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn ansatz_rotations_of_pi_flip_both_layers() {
    // RY(π) on qubit 0 in both layers composes to -I, RY(0) is the identity,
    // so the feature-map distribution is unchanged: uniform.
    let qnn = SamplerQnn::maze_layer(1).unwrap();
    let p = qnn_forward(&qnn, &[0.3, -1.1], &[PI, 0.0, PI, 0.0]).unwrap();
    for v in p {
        assert!((v - 0.25).abs() < 1e-12);
    }
}

#[test]
fn ansatz_alone_from_zero() {
    // Without the feature map, RY(a) then RY(b) on qubit 0 gives
    // P(bit0 = 1) = sin²((a+b)/2); qubit 1 stays in |0>.
    let qnn = SamplerQnn::new(build_real_amplitudes(2, 1, false).unwrap());
    let (a, b) = (0.4, 0.9);
    let p = qnn.forward(&[], &[a, 0.0, b, 0.0]).unwrap();
    let s = ((a + b) / 2.0).sin().powi(2);
    let expected = [1.0 - s, s, 0.0, 0.0];
    for (got, want) in p.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn parameter_shift_matches_finite_differences() {
    let qnn = SamplerQnn::maze_layer(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..25 {
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-PI..PI)).collect();
        let w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..TAU)).collect();
        let (jx, jw) = parameter_shift_jacobians(&qnn, &x, &w).unwrap();
        let fx = central_jacobian(|v| qnn_forward(&qnn, v, &w).unwrap(), &x, 1e-5);
        let fw = central_jacobian(|v| qnn_forward(&qnn, &x, v).unwrap(), &w, 1e-5);
        for i in 0..4 {
            for j in 0..2 {
                assert!((jx.get(i, j) - fx[i][j]).abs() < 1e-6);
            }
            for j in 0..4 {
                assert!((jw.get(i, j) - fw[i][j]).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn deeper_feature_map_gradients_match_finite_differences() {
    // Two repetitions bind every input twice; the shift rule must sum both.
    let qnn = SamplerQnn::maze_layer(2).unwrap();
    let (x, w) = ([0.7, -0.2], [0.1, 1.3, 2.2, -0.4]);
    let (jx, _) = parameter_shift_jacobians(&qnn, &x, &w).unwrap();
    let fx = central_jacobian(|v| qnn_forward(&qnn, v, &w).unwrap(), &x, 1e-5);
    for i in 0..4 {
        for j in 0..2 {
            assert!((jx.get(i, j) - fx[i][j]).abs() < 1e-6);
        }
    }
}

#[test]
fn sample_counts_follow_distribution() {
    let qnn = SamplerQnn::maze_layer(1).unwrap();
    let counts = qnn.sample_counts(&[0.0, 0.0], &[0.0; 4], 4000, 5).unwrap();
    assert_eq!(counts.values().sum::<u64>(), 4000);
    for c in counts.values() {
        assert!((800..=1200).contains(c), "{counts:?}");
    }
    assert_eq!(counts, qnn.sample_counts(&[0.0, 0.0], &[0.0; 4], 4000, 5).unwrap());
    assert!(qnn.sample_counts(&[0.0, 0.0], &[0.0; 4], 0, 5).is_err());
}

fn gate_strategy() -> impl Strategy<Value = Gate> {
    let q = 0..2usize;
    let t = -10.0..10.0f64;
    prop_oneof![
        q.clone().prop_map(Gate::H),
        q.clone().prop_map(Gate::X),
        (q.clone(), t.clone()).prop_map(|(q, t)| Gate::Ry(q, t)),
        (q.clone(), t.clone()).prop_map(|(q, t)| Gate::Rz(q, t)),
        (q.clone(), t).prop_map(|(q, t)| Gate::P(q, t)),
        q.prop_map(|q| Gate::Cx { control: q, target: 1 - q }),
    ]
}

proptest! {
    #[test]
    fn gates_preserve_norm(
        gates in prop::collection::vec(gate_strategy(), 1..12),
        re in prop::collection::vec(-1.0..1.0f64, 4),
        im in prop::collection::vec(-1.0..1.0f64, 4),
    ) {
        let amps: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let amps = amps.into_iter().map(|a| a / norm).collect();
        let mut state = StateVector::from_amplitudes(2, amps).unwrap();
        for g in &gates {
            state = apply_gate(state, g).unwrap();
        }
        prop_assert!((state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qnn_output_is_a_distribution(
        x in prop::collection::vec(-10.0..10.0f64, 2),
        w in prop::collection::vec(0.0..TAU, 4),
    ) {
        let qnn = SamplerQnn::maze_layer(1).unwrap();
        let p = qnn_forward(&qnn, &x, &w).unwrap();
        prop_assert!(p.iter().all(|&v| v >= -1e-15));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}
