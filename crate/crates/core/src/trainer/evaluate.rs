//! Greedy-policy evaluation over every start cell.

use super::TrainError;
use crate::agent::{argmax, QNetwork};
use crate::env::{reset, Action, Cell, Maze, Status};

/// Anything that assigns four action values to an agent position.
pub trait QFunction {
    fn q_at(&self, maze: &Maze, cell: Cell) -> Result<[f64; 4], TrainError>;
}

impl QFunction for QNetwork {
    fn q_at(&self, maze: &Maze, cell: Cell) -> Result<[f64; 4], TrainError> {
        if self.maze_size() != maze.size() {
            return Err(TrainError::Contract(format!(
                "network expects a {0}x{0} maze, got {1}x{1}",
                self.maze_size(),
                maze.size()
            )));
        }
        Ok(self.q_values_at(maze, cell)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyEvaluation {
    /// Fraction of free non-exit start cells from which the greedy rollout wins.
    pub success_fraction: f64,
    /// Steps to the exit from each start cell, `None` if the rollout failed.
    pub path_lengths: Vec<(Cell, Option<usize>)>,
    /// Greedy action per cell, row-major; `None` on walls and the exit.
    pub policy: Vec<Option<Action>>,
    pub size: usize,
}

impl PolicyEvaluation {
    pub fn action_at(&self, c: Cell) -> Option<Action> {
        self.policy[c.row * self.size + c.col]
    }

    /// Arrow map: one row per line, `#` for walls, `E` for the exit.
    pub fn render(&self, maze: &Maze) -> String {
        let mut out = String::new();
        for row in 0..maze.size() {
            for col in 0..maze.size() {
                let c = Cell::new(row, col);
                let ch = if c == maze.exit() {
                    'E'
                } else if !maze.is_free(c) {
                    '#'
                } else {
                    self.action_at(c).map_or('?', |a| a.arrow())
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// Rolls out the greedy policy from every free non-exit cell for at most
/// `2 N²` steps.
pub fn evaluate_policy<Q: QFunction + ?Sized>(q: &Q, maze: &Maze) -> Result<PolicyEvaluation, TrainError> {
    let n = maze.size();
    let mut policy = vec![None; n * n];
    for c in maze.free_cells().into_iter().filter(|&c| c != maze.exit()) {
        policy[c.row * n + c.col] = Some(argmax(&q.q_at(maze, c)?));
    }
    let limit = 2 * n * n;
    let mut path_lengths = Vec::new();
    // Greedy actions depend only on the agent cell, so the cached map drives
    // every rollout.
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    for start in maze.free_cells().into_iter().filter(|&c| c != maze.exit()) {
        let mut state = reset(maze, Some(start), &mut rng)?;
        while state.status() == Status::Ongoing && state.step_count() < limit {
            let a = policy[state.agent().row * n + state.agent().col].expect("non-exit free cell has an action");
            state.advance(maze, a)?;
        }
        let won = state.status() == Status::Win;
        path_lengths.push((start, won.then_some(state.step_count())));
    }
    let successes = path_lengths.iter().filter(|(_, l)| l.is_some()).count();
    let success_fraction = if path_lengths.is_empty() { 0.0 } else { successes as f64 / path_lengths.len() as f64 };
    Ok(PolicyEvaluation { success_fraction, path_lengths, policy, size: n })
}
