//! Deterministic grid-maze MDP.
//!
//! Maze files are plain text: the first line holds the side length `N`, then
//! `N` rows of `N` characters from `.` (free), `#` (wall), `S` (start) and
//! `E` (exit). Exactly one `S` and one `E` are required and the exit must be
//! reachable from the start.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Reward for reaching the exit.
pub const WIN_REWARD: f64 = 1.0;
/// Reward for moving onto a free cell not yet visited this episode.
pub const NEW_CELL_REWARD: f64 = -0.04;
/// Reward for moving onto a free cell already visited this episode.
pub const VISITED_CELL_REWARD: f64 = -0.25;
/// Reward for bumping into a wall or the grid boundary.
pub const BLOCKED_REWARD: f64 = -0.75;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("maze parse error: {0}")]
    Parse(String),
    #[error("maze is unsolvable: exit {exit} unreachable from start {start}")]
    Unsolvable { start: Cell, exit: Cell },
    #[error("invalid start cell {0}")]
    InvalidStart(Cell),
    #[error("episode already finished with status {0:?}")]
    Terminal(Status),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Left = 0,
    Up = 1,
    Right = 2,
    Down = 3,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Left, Action::Up, Action::Right, Action::Down];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    pub fn arrow(self) -> char {
        match self {
            Action::Left => '←',
            Action::Up => '↑',
            Action::Right => '→',
            Action::Down => '↓',
        }
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Action::Left => (0, -1),
            Action::Up => (-1, 0),
            Action::Right => (0, 1),
            Action::Down => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tile {
    Free,
    Wall,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maze {
    size: usize,
    tiles: Vec<Tile>,
    start: Cell,
    exit: Cell,
}

impl Maze {
    /// Builds and validates a maze from a row-major tile grid.
    pub fn new(size: usize, tiles: Vec<Tile>, start: Cell, exit: Cell) -> Result<Self, EnvError> {
        if size < 3 {
            return Err(EnvError::Parse(format!("maze size {size} is below the minimum of 3")));
        }
        if tiles.len() != size * size {
            return Err(EnvError::Parse(format!("{} tiles for a {size}x{size} maze", tiles.len())));
        }
        let maze = Self { size, tiles, start, exit };
        for c in [start, exit] {
            if !maze.is_free(c) {
                return Err(EnvError::Parse(format!("start/exit cell {c} is not a free cell")));
            }
        }
        if start == exit {
            return Err(EnvError::Parse("start and exit coincide".into()));
        }
        if maze.exit_distances()[maze.idx(start)].is_none() {
            return Err(EnvError::Unsolvable { start, exit });
        }
        Ok(maze)
    }

    pub fn parse(text: &str) -> Result<Self, EnvError> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| EnvError::Parse("empty maze file".into()))?;
        let size: usize =
            header.trim().parse().map_err(|_| EnvError::Parse(format!("bad size line {header:?}")))?;
        let mut tiles = Vec::with_capacity(size * size);
        let (mut start, mut exit) = (None, None);
        for row in 0..size {
            let line = lines
                .next()
                .ok_or_else(|| EnvError::Parse(format!("expected {size} grid rows, found {row}")))?;
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != size {
                return Err(EnvError::Parse(format!("row {row} has {} cells, expected {size}", chars.len())));
            }
            for (col, ch) in chars.into_iter().enumerate() {
                let here = Cell::new(row, col);
                let tile = match ch {
                    '.' => Tile::Free,
                    '#' => Tile::Wall,
                    'S' if start.is_none() => {
                        start = Some(here);
                        Tile::Free
                    }
                    'E' if exit.is_none() => {
                        exit = Some(here);
                        Tile::Free
                    }
                    'S' | 'E' => return Err(EnvError::Parse(format!("duplicate '{ch}' at {here}"))),
                    other => return Err(EnvError::Parse(format!("unexpected character {other:?} at {here}"))),
                };
                tiles.push(tile);
            }
        }
        if let Some(extra) = lines.next() {
            return Err(EnvError::Parse(format!("trailing content after grid: {extra:?}")));
        }
        let start = start.ok_or_else(|| EnvError::Parse("no start cell 'S'".into()))?;
        let exit = exit.ok_or_else(|| EnvError::Parse("no exit cell 'E'".into()))?;
        Self::new(size, tiles, start, exit)
    }

    /// One of the bundled benchmark mazes (`N` in 3..=5).
    pub fn shipped(size: usize) -> Option<Self> {
        let text = match size {
            3 => include_str!("../../../mazes/maze3.txt"),
            4 => include_str!("../../../mazes/maze4.txt"),
            5 => include_str!("../../../mazes/maze5.txt"),
            _ => return None,
        };
        Some(Self::parse(text).expect("bundled maze is valid"))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn exit(&self) -> Cell {
        self.exit
    }

    fn idx(&self, c: Cell) -> usize {
        c.row * self.size + c.col
    }

    pub fn tile(&self, c: Cell) -> Option<Tile> {
        (c.row < self.size && c.col < self.size).then(|| self.tiles[self.idx(c)])
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.tile(c) == Some(Tile::Free)
    }

    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.size)
            .flat_map(|r| (0..self.size).map(move |c| Cell::new(r, c)))
            .filter(|&c| self.is_free(c))
            .collect()
    }

    /// Cell reached by `action` from `from`, or `None` when blocked.
    pub fn neighbor(&self, from: Cell, action: Action) -> Option<Cell> {
        let (dr, dc) = action.delta();
        let row = from.row.checked_add_signed(dr)?;
        let col = from.col.checked_add_signed(dc)?;
        let to = Cell::new(row, col);
        self.is_free(to).then_some(to)
    }

    /// Shortest-path step counts to the exit, indexed row-major; `None` for
    /// walls and unreachable cells.
    pub fn exit_distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.tiles.len()];
        dist[self.idx(self.exit)] = Some(0);
        let mut queue = VecDeque::from([self.exit]);
        while let Some(c) = queue.pop_front() {
            let d = dist[self.idx(c)].expect("queued cells have a distance");
            for a in Action::ALL {
                if let Some(n) = self.neighbor(c, a) {
                    let i = self.idx(n);
                    if dist[i].is_none() {
                        dist[i] = Some(d + 1);
                        queue.push_back(n);
                    }
                }
            }
        }
        dist
    }

    /// Shortest path length from `from` to the exit.
    pub fn distance_to_exit(&self, from: Cell) -> Option<usize> {
        self.tile(from)?;
        self.exit_distances()[self.idx(from)]
    }

    /// Actions from `from` that lie on some shortest path to the exit.
    pub fn optimal_actions(&self, from: Cell) -> Vec<Action> {
        let dist = self.exit_distances();
        let Some(d) = self.tile(from).and(dist[self.idx(from)]) else { return Vec::new() };
        Action::ALL
            .into_iter()
            .filter(|&a| self.neighbor(from, a).is_some_and(|n| dist[self.idx(n)] == Some(d.wrapping_sub(1))))
            .collect()
    }

    pub fn lose_threshold(&self) -> f64 {
        -0.5 * (self.size * self.size) as f64
    }
}

/// Parses and validates maze file contents.
pub fn load_maze(text: &str) -> Result<Maze, EnvError> {
    Maze::parse(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ongoing,
    Win,
    Lose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    agent: Cell,
    visited: Vec<bool>,
    cumulative_reward: f64,
    step_count: usize,
    status: Status,
}

impl EnvState {
    pub fn agent(&self) -> Cell {
        self.agent
    }

    pub fn cumulative_reward(&self) -> f64 {
        self.cumulative_reward
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_visited(&self, maze: &Maze, c: Cell) -> bool {
        maze.tile(c).is_some() && self.visited[maze.idx(c)]
    }

    /// Advances the episode in place and returns the reward.
    pub fn advance(&mut self, maze: &Maze, action: Action) -> Result<f64, EnvError> {
        if self.status != Status::Ongoing {
            return Err(EnvError::Terminal(self.status));
        }
        let reward = match maze.neighbor(self.agent, action) {
            None => BLOCKED_REWARD,
            Some(next) => {
                self.agent = next;
                let i = maze.idx(next);
                if next == maze.exit {
                    WIN_REWARD
                } else if self.visited[i] {
                    VISITED_CELL_REWARD
                } else {
                    NEW_CELL_REWARD
                }
            }
        };
        let i = maze.idx(self.agent);
        self.visited[i] = true;
        self.cumulative_reward += reward;
        self.step_count += 1;
        if self.agent == maze.exit {
            self.status = Status::Win;
        } else if self.cumulative_reward < maze.lose_threshold() {
            self.status = Status::Lose;
        }
        Ok(reward)
    }
}

/// Starts an episode at `start_override` or, if absent, at a uniformly random
/// free non-exit cell.
pub fn reset<R: Rng + ?Sized>(maze: &Maze, start_override: Option<Cell>, rng: &mut R) -> Result<EnvState, EnvError> {
    let agent = match start_override {
        Some(c) if maze.is_free(c) && c != maze.exit => c,
        Some(c) => return Err(EnvError::InvalidStart(c)),
        None => {
            let candidates: Vec<Cell> = maze.free_cells().into_iter().filter(|&c| c != maze.exit).collect();
            candidates[rng.gen_range(0..candidates.len())]
        }
    };
    let mut visited = vec![false; maze.size * maze.size];
    visited[maze.idx(agent)] = true;
    Ok(EnvState { agent, visited, cumulative_reward: 0.0, step_count: 0, status: Status::Ongoing })
}

/// Single-channel `1 x N x N` grid: 0.0 wall, 1.0 free, 0.5 agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    size: usize,
    values: Vec<f64>,
}

pub const WALL_VALUE: f64 = 0.0;
pub const FREE_VALUE: f64 = 1.0;
pub const AGENT_VALUE: f64 = 0.5;

impl Observation {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn shape(&self) -> [usize; 3] {
        [1, self.size, self.size]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, c: Cell) -> f64 {
        self.values[c.row * self.size + c.col]
    }
}

pub fn encode_observation(maze: &Maze, state: &EnvState) -> Observation {
    let mut values: Vec<f64> =
        maze.tiles.iter().map(|t| if *t == Tile::Free { FREE_VALUE } else { WALL_VALUE }).collect();
    values[maze.idx(state.agent)] = AGENT_VALUE;
    Observation { size: maze.size, values }
}

/// Observation with the agent placed at `cell`, independent of episode history.
pub fn observe_at(maze: &Maze, cell: Cell) -> Observation {
    let mut values: Vec<f64> =
        maze.tiles.iter().map(|t| if *t == Tile::Free { FREE_VALUE } else { WALL_VALUE }).collect();
    values[maze.idx(cell)] = AGENT_VALUE;
    Observation { size: maze.size, values }
}

/// Applies `action`, returning the successor state, reward and observation.
pub fn step(maze: &Maze, state: &EnvState, action: Action) -> Result<(EnvState, f64, Observation), EnvError> {
    let mut next = state.clone();
    let reward = next.advance(maze, action)?;
    let obs = encode_observation(maze, &next);
    Ok((next, reward, obs))
}

/// Actions whose target cell is inside the grid and free.
pub fn valid_actions(maze: &Maze, state: &EnvState) -> Vec<Action> {
    Action::ALL.into_iter().filter(|&a| maze.neighbor(state.agent, a).is_some()).collect()
}
