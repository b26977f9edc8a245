use qmaze::agent::{Architecture, QNetwork, Transition};
use qmaze::autodiff::{Graph, Tensor};
use qmaze::env::{observe_at, Cell};
use qmaze::trainer::{
    evaluate_policy, parse_history_csv, q_loss, tabular_q_learn, train, win_rate, DqnTrainer, QFunction,
    TabularConfig, TrainConfig, TrainError,
};
use qmaze::{Action, Maze};

/// Sets the output layer to zero weights and the given biases, so the
/// network outputs `q` for every input.
fn constant_net(arch: Architecture, q: [f64; 4]) -> QNetwork {
    let mut net = QNetwork::build(arch, 4, 0).unwrap();
    let last = net.params().len() - 1;
    let tensors = net.params_mut().tensors_mut();
    tensors[last - 1].values_mut().iter_mut().for_each(|v| *v = 0.0);
    tensors[last].values_mut().copy_from_slice(&q);
    net
}

fn transition(maze: &Maze, reward: f64, done: bool) -> Transition {
    Transition {
        state: observe_at(maze, maze.start()),
        action: Action::Right,
        reward,
        next_state: observe_at(maze, Cell::new(0, 1)),
        done,
    }
}

#[test]
fn parameter_counts() {
    let counts = |arch, n| QNetwork::build(arch, n, 1).unwrap();
    let h4 = counts(Architecture::HybridQnn, 4);
    assert_eq!(h4.layer_param_counts(), vec![80, 2080, 258, 4, 20]);
    assert_eq!(h4.param_count(), 2442);
    assert_eq!(counts(Architecture::ClassicalCnn, 4).param_count(), 6588);
    assert_eq!(counts(Architecture::HybridQnn, 5).param_count(), 4890);
    assert_eq!(counts(Architecture::HybridQnn, 5).layer_param_counts(), vec![160, 4640, 66, 4, 20]);
    assert_eq!(counts(Architecture::ClassicalCnn, 5).param_count(), 6156);
    assert!(QNetwork::build(Architecture::HybridQnn, 2, 1).is_err());
}

#[test]
fn layer_output_shapes() {
    let net = QNetwork::build(Architecture::HybridQnn, 4, 1).unwrap();
    let shapes: Vec<Vec<usize>> = net.summary().into_iter().map(|l| l.output_shape).collect();
    assert_eq!(shapes, vec![vec![16, 3, 3], vec![16, 3, 3], vec![32, 2, 2], vec![32, 2, 2], vec![2], vec![4], vec![4]]);
    let mut g = Graph::new();
    let x = g.constant(&Tensor::zeros(vec![3, 1, 4, 4]));
    let q = net.forward(&mut g, x).unwrap();
    assert_eq!(g.shape(q), &[3, 4]);
}

#[test]
fn same_seed_same_weights() {
    for arch in [Architecture::ClassicalCnn, Architecture::HybridQnn] {
        let a = QNetwork::build(arch, 4, 9).unwrap();
        let b = QNetwork::build(arch, 4, 9).unwrap();
        let c = QNetwork::build(arch, 4, 10).unwrap();
        assert_eq!(a.params().tensors(), b.params().tensors());
        assert_ne!(a.params().tensors(), c.params().tensors());
    }
}

#[test]
fn q_loss_examples() {
    let maze = Maze::shipped(4).unwrap();
    let t = transition(&maze, 0.0, false);
    // Prediction equals the Bellman target: 0 + 0.9 * 0 = 0.
    let zero = constant_net(Architecture::ClassicalCnn, [0.0; 4]);
    assert_eq!(q_loss(&zero, &zero, &[&t], 0.9).unwrap().value(), 0.0);
    let target = constant_net(Architecture::ClassicalCnn, [1.0, 0.0, -2.0, 0.5]);
    let loss = q_loss(&zero, &target, &[&t], 0.9).unwrap().value();
    assert!((loss - 0.81).abs() < 1e-12);
    // A terminal transition ignores the bootstrap term.
    let done = transition(&maze, 1.0, true);
    assert!((q_loss(&zero, &target, &[&done], 0.9).unwrap().value() - 1.0).abs() < 1e-12);
    let hybrid = constant_net(Architecture::HybridQnn, [0.0; 4]);
    assert!(matches!(q_loss(&zero, &hybrid, &[&t], 0.9), Err(TrainError::Contract(_))));
    assert!(q_loss(&zero, &zero, &[], 0.9).is_err());
}

#[test]
fn target_network_syncs_on_schedule() {
    let maze = Maze::shipped(3).unwrap();
    let mut config = TrainConfig::for_maze_size(Architecture::ClassicalCnn, 3).with_episodes(30);
    config.target_sync_interval = 4;
    config.batch_size = 8;
    let mut trainer = DqnTrainer::new(&config, &maze).unwrap();
    let mut previous = trainer.target().params().tensors().to_vec();
    for episode in 1..=30 {
        trainer.run_episode().unwrap();
        let target: Vec<Vec<f64>> = trainer.target().params().tensors().iter().map(|t| t.values().to_vec()).collect();
        let online: Vec<Vec<f64>> = trainer.online().params().tensors().iter().map(|t| t.values().to_vec()).collect();
        let prev: Vec<Vec<f64>> = previous.iter().map(|t| t.values().to_vec()).collect();
        if episode % 4 == 0 {
            assert_eq!(target, online, "episode {episode}");
        } else {
            assert_eq!(target, prev, "episode {episode}");
        }
        previous = trainer.target().params().tensors().to_vec();
    }
    assert!(trainer.target().params().tensors().iter().all(|t| !t.requires_grad() && t.grad().is_none()));
}

#[test]
fn training_is_deterministic() {
    let maze = Maze::shipped(3).unwrap();
    let mut config = TrainConfig::for_maze_size(Architecture::HybridQnn, 3).with_episodes(25);
    config.seed = 4;
    config.record_timing = false;
    let (net_a, a) = train(&config, &maze).unwrap();
    let (net_b, b) = train(&config, &maze).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(net_a.params().tensors(), net_b.params().tensors());
    config.seed = 5;
    assert_ne!(train(&config, &maze).unwrap().0.params().tensors(), net_a.params().tensors());
}

#[test]
fn zero_episodes() {
    let maze = Maze::shipped(4).unwrap();
    let config = TrainConfig::for_maze_size(Architecture::ClassicalCnn, 4).with_episodes(0);
    let (net, report) = train(&config, &maze).unwrap();
    assert!(report.records.is_empty());
    assert_eq!(report.win_rate_pct, 0.0);
    assert_eq!(report.model_size, net.param_count());
}

#[test]
fn history_round_trip_preserves_win_rate() {
    let maze = Maze::shipped(3).unwrap();
    let config = TrainConfig::for_maze_size(Architecture::ClassicalCnn, 3).with_episodes(40);
    let (_, report) = train(&config, &maze).unwrap();
    let records = parse_history_csv(&report.to_csv()).unwrap();
    assert_eq!(records.len(), 40);
    let wins = records.iter().filter(|r| r.win).count();
    assert_eq!(100.0 * wins as f64 / 40.0, report.win_rate_pct);
    assert_eq!(win_rate(&report), report.win_rate_pct);
}

#[test]
fn invalid_configs_are_rejected() {
    let maze = Maze::shipped(4).unwrap();
    let base = TrainConfig::for_maze_size(Architecture::ClassicalCnn, 4);
    let mut c = base.clone();
    c.gamma = 0.0;
    assert!(matches!(train(&c, &maze), Err(TrainError::Config(_))));
    let mut c = base.clone();
    c.batch_size = c.replay_capacity + 1;
    assert!(matches!(train(&c, &maze), Err(TrainError::Config(_))));
    let mut c = base;
    c.target_sync_interval = 0;
    assert!(matches!(train(&c, &maze), Err(TrainError::Config(_))));
}

/// Q-values that prefer BFS-optimal moves: 1 for optimal actions, 0 otherwise.
struct BfsOracle;

impl QFunction for BfsOracle {
    fn q_at(&self, maze: &Maze, cell: Cell) -> Result<[f64; 4], TrainError> {
        let mut q = [0.0; 4];
        for a in maze.optimal_actions(cell) {
            q[a.index()] = 1.0;
        }
        Ok(q)
    }
}

#[test]
fn bfs_policy_solves_every_start() {
    for n in [3, 4, 5] {
        let maze = Maze::shipped(n).unwrap();
        let eval = evaluate_policy(&BfsOracle, &maze).unwrap();
        assert_eq!(eval.success_fraction, 1.0);
        for (cell, len) in &eval.path_lengths {
            assert_eq!(*len, maze.distance_to_exit(*cell));
        }
    }
}

#[test]
fn untrained_network_evaluates() {
    let maze = Maze::shipped(4).unwrap();
    let net = QNetwork::build(Architecture::HybridQnn, 4, 1).unwrap();
    let eval = evaluate_policy(&net, &maze).unwrap();
    assert!((0.0..=1.0).contains(&eval.success_fraction));
    assert_eq!(eval.render(&maze).lines().count(), 4);
    let small = Maze::shipped(3).unwrap();
    assert!(evaluate_policy(&net, &small).is_err());
}

#[test]
fn tabular_oracle_matches_bfs_on_shipped_mazes() {
    for n in [3, 4] {
        let maze = Maze::shipped(n).unwrap();
        let q = tabular_q_learn(&maze, &TabularConfig::for_maze(&maze, 3000)).unwrap();
        let eval = evaluate_policy(&q, &maze).unwrap();
        assert_eq!(eval.success_fraction, 1.0, "maze {n}");
        for (cell, len) in &eval.path_lengths {
            assert_eq!(*len, maze.distance_to_exit(*cell), "maze {n} cell {cell:?}");
        }
    }
}

#[test]
fn architecture_swap_uses_the_same_loop() {
    let maze = Maze::shipped(4).unwrap();
    let mut config = TrainConfig::for_maze_size(Architecture::ClassicalCnn, 4).with_episodes(5);
    config.record_timing = false;
    let (classical, a) = train(&config, &maze).unwrap();
    config.architecture = Architecture::HybridQnn;
    let (hybrid, b) = train(&config, &maze).unwrap();
    assert_eq!((classical.param_count(), hybrid.param_count()), (6588, 2442));
    assert_eq!((a.records.len(), b.records.len()), (5, 5));
    assert_eq!(a.records[0].epsilon, b.records[0].epsilon);
}
