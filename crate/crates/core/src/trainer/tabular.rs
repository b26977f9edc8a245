//! Tabular Q-learning on the same maze MDP; used as a small-instance oracle
//! for the DQN pipeline.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::evaluate::QFunction;
use super::TrainError;
use crate::agent::{argmax, EpsilonSchedule};
use crate::env::{reset, Action, Cell, Maze, Status};

#[derive(Debug, Clone, PartialEq)]
pub struct TabularQ {
    values: BTreeMap<Cell, [f64; 4]>,
    pub alpha: f64,
    pub gamma: f64,
}

impl TabularQ {
    /// Zero-initialised table over the free cells of `maze`.
    pub fn new(maze: &Maze, alpha: f64, gamma: f64) -> Self {
        let values = maze.free_cells().into_iter().map(|c| (c, [0.0; 4])).collect();
        Self { values, alpha, gamma }
    }

    pub fn get(&self, cell: Cell) -> Option<&[f64; 4]> {
        self.values.get(&cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.values.keys()
    }

    /// `Q(s,a) += α [r + γ max_a' Q(s',a') - Q(s,a)]`, with the bootstrap term
    /// dropped when `done`.
    pub fn update(&mut self, cell: Cell, action: Action, reward: f64, next: Cell, done: bool) {
        let bootstrap = if done { 0.0 } else { self.values[&next].iter().copied().fold(f64::NEG_INFINITY, f64::max) };
        let q = &mut self.values.get_mut(&cell).expect("free cell")[action.index()];
        *q += self.alpha * (reward + self.gamma * bootstrap - *q);
    }
}

impl QFunction for TabularQ {
    fn q_at(&self, _maze: &Maze, cell: Cell) -> Result<[f64; 4], TrainError> {
        self.values.get(&cell).copied().ok_or_else(|| TrainError::Contract(format!("{cell} is not a free cell")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub episodes: usize,
    pub max_steps_per_episode: usize,
    pub epsilon: EpsilonSchedule,
    pub seed: u64,
}

impl TabularConfig {
    pub fn for_maze(maze: &Maze, episodes: usize) -> Self {
        let n = maze.size();
        Self {
            alpha: 0.1,
            gamma: 0.95,
            episodes,
            max_steps_per_episode: 4 * n * n,
            epsilon: EpsilonSchedule::for_episodes(episodes),
            seed: 0,
        }
    }
}

/// Epsilon-greedy tabular Q-learning from random start cells.
pub fn tabular_q_learn(maze: &Maze, config: &TabularConfig) -> Result<TabularQ, TrainError> {
    let mut table = TabularQ::new(maze, config.alpha, config.gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for episode in 0..config.episodes {
        let epsilon = config.epsilon.epsilon_at(episode);
        let mut state = reset(maze, None, &mut rng)?;
        while state.status() == Status::Ongoing && state.step_count() < config.max_steps_per_episode {
            let here = state.agent();
            let action = if rng.gen::<f64>() < epsilon {
                Action::ALL[rng.gen_range(0..4)]
            } else {
                argmax(&table.values[&here])
            };
            let reward = state.advance(maze, action)?;
            table.update(here, action, reward, state.agent(), state.status() != Status::Ongoing);
        }
    }
    Ok(table)
}
