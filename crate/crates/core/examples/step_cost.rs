//! Average cost of one training update (loss, backward, AdamW step) and of
//! one single-observation forward pass, per architecture, on the 4x4 maze.

use std::time::Instant;

use qmaze::agent::{QNetwork, Transition};
use qmaze::autodiff::{zero_grad, AdamWConfig, AdamWState};
use qmaze::env::{observe_at, Action, Maze};
use qmaze::trainer::q_loss;
use qmaze::Architecture;

fn main() {
    let maze = Maze::shipped(4).unwrap();
    let cells = maze.free_cells();
    let batch: Vec<Transition> = (0..32)
        .map(|i| Transition {
            state: observe_at(&maze, cells[i % cells.len()]),
            action: Action::ALL[i % 4],
            reward: -0.04,
            next_state: observe_at(&maze, cells[(i + 1) % cells.len()]),
            done: false,
        })
        .collect();
    let refs: Vec<&Transition> = batch.iter().collect();
    for arch in [Architecture::ClassicalCnn, Architecture::HybridQnn] {
        let mut net = QNetwork::build(arch, 4, 0).unwrap();
        let mut target = net.clone();
        target.freeze();
        let mut opt = AdamWState::new(AdamWConfig::default(), net.params());
        let t = Instant::now();
        let iters = 2000;
        for _ in 0..iters {
            zero_grad(net.params_mut());
            let l = q_loss(&net, &target, &refs, 0.95).unwrap();
            l.graph.backward(l.loss, net.params_mut()).unwrap();
            opt.step(net.params_mut()).unwrap();
        }
        println!("{arch}: {:.3} ms per update", t.elapsed().as_secs_f64() * 1e3 / iters as f64);
        let t = Instant::now();
        for _ in 0..iters {
            net.q_values(&batch[0].state).unwrap();
        }
        println!("{arch}: {:.3} ms per single forward", t.elapsed().as_secs_f64() * 1e3 / iters as f64);
    }
}
