//! Replay-buffer DQN training loop with a periodically synchronised target
//! network.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{win_rate_of, EpisodeRecord, TrainReport};
use super::TrainError;
use crate::agent::{select_action, AgentError, Architecture, EpsilonSchedule, QNetwork, ReplayBuffer, Transition};
use crate::autodiff::{zero_grad, AdamWConfig, AdamWState, Graph, NodeId};
use crate::env::{encode_observation, reset, Maze, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub architecture: Architecture,
    pub episodes: usize,
    pub max_steps_per_episode: usize,
    pub batch_size: usize,
    pub gamma: f64,
    pub replay_capacity: usize,
    /// Target network sync period, in episodes.
    pub target_sync_interval: usize,
    pub optimizer: AdamWConfig,
    pub epsilon: EpsilonSchedule,
    pub seed: u64,
    /// When false, per-episode and total wall-clock times are recorded as 0
    /// so that exported histories are byte-reproducible.
    pub record_timing: bool,
}

impl TrainConfig {
    /// Defaults scaled to the maze side length `n`.
    pub fn for_maze_size(architecture: Architecture, n: usize) -> Self {
        let episodes = if n <= 4 { 1000 } else { 2000 };
        Self {
            architecture,
            episodes,
            max_steps_per_episode: 4 * n * n,
            batch_size: 32,
            gamma: 0.95,
            replay_capacity: 10 * n.pow(4),
            target_sync_interval: 10,
            optimizer: AdamWConfig::default(),
            epsilon: EpsilonSchedule::for_episodes(episodes),
            seed: 0,
            record_timing: true,
        }
    }

    /// Sets `episodes` and rescales the default epsilon time constant.
    pub fn with_episodes(mut self, episodes: usize) -> Self {
        self.episodes = episodes;
        self.epsilon.tau = EpsilonSchedule::for_episodes(episodes).tau;
        self
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let fail = |m: String| Err(TrainError::Config(m));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if self.batch_size == 0 || self.batch_size > self.replay_capacity {
            return fail(format!(
                "batch_size {} must be in 1..=replay_capacity ({})",
                self.batch_size, self.replay_capacity
            ));
        }
        if self.max_steps_per_episode == 0 {
            return fail("max_steps_per_episode must be positive".into());
        }
        if self.target_sync_interval == 0 {
            return fail("target_sync_interval must be positive".into());
        }
        EpsilonSchedule::new(self.epsilon.start, self.epsilon.end, self.epsilon.tau)?;
        let o = &self.optimizer;
        if !(o.lr > 0.0 && (0.0..1.0).contains(&o.beta1) && (0.0..1.0).contains(&o.beta2) && o.eps > 0.0 && o.weight_decay >= 0.0)
        {
            return fail(format!("invalid optimizer settings {o:?}"));
        }
        Ok(())
    }
}

/// Squared Bellman residual over a batch, ready for `backward`.
pub struct QLoss {
    pub graph: Graph,
    pub loss: NodeId,
}

impl QLoss {
    pub fn value(&self) -> f64 {
        self.graph.value(self.loss)[0]
    }
}

/// Mean over the batch of `(r + γ max_a' Q_target(s', a') (1 - done) - Q(s, a))²`.
/// The bootstrap term is evaluated on `target_net` and carries no gradient.
pub fn q_loss(net: &QNetwork, target_net: &QNetwork, batch: &[&Transition], gamma: f64) -> Result<QLoss, TrainError> {
    if !net.same_layout(target_net) {
        return Err(TrainError::Contract("online and target networks differ in architecture".into()));
    }
    if batch.is_empty() {
        return Err(TrainError::Contract("q_loss needs a non-empty batch".into()));
    }
    let next: Vec<_> = batch.iter().map(|t| &t.next_state).collect();
    let next_q = target_net.q_values_batch(&next)?;
    let targets: Vec<f64> = batch
        .iter()
        .zip(&next_q)
        .map(|(t, q)| {
            let bootstrap = if t.done { 0.0 } else { q.iter().copied().fold(f64::NEG_INFINITY, f64::max) };
            t.reward + gamma * bootstrap
        })
        .collect();
    let states: Vec<_> = batch.iter().map(|t| &t.state).collect();
    let mut graph = Graph::new();
    let input = graph.constant(&net.batch_tensor(&states)?);
    let q = net.forward(&mut graph, input)?;
    let actions: Vec<usize> = batch.iter().map(|t| t.action.index()).collect();
    let chosen = graph.gather(q, &actions).map_err(AgentError::from)?;
    let loss = graph.mse_loss(chosen, &targets).map_err(AgentError::from)?;
    Ok(QLoss { graph, loss })
}

fn elapsed_ms(start: Instant, record: bool) -> f64 {
    if record {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

/// Episode-at-a-time DQN training state: online and target networks,
/// optimizer, replay buffer and exploration stream.
pub struct DqnTrainer<'m> {
    config: TrainConfig,
    maze: &'m Maze,
    net: QNetwork,
    target: QNetwork,
    optimizer: AdamWState,
    buffer: ReplayBuffer,
    rng: ChaCha8Rng,
    records: Vec<EpisodeRecord>,
    started: Instant,
}

impl<'m> DqnTrainer<'m> {
    pub fn new(config: &TrainConfig, maze: &'m Maze) -> Result<Self, TrainError> {
        config.validate()?;
        let started = Instant::now();
        // Separate streams for weight init and for the environment/exploration.
        let net = QNetwork::build(config.architecture, maze.size(), config.seed)?;
        let mut target = net.clone();
        target.freeze();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(1);
        Ok(Self {
            optimizer: AdamWState::new(config.optimizer, net.params()),
            buffer: ReplayBuffer::new(config.replay_capacity)?,
            records: Vec::with_capacity(config.episodes),
            config: config.clone(),
            maze,
            net,
            target,
            rng,
            started,
        })
    }

    pub fn online(&self) -> &QNetwork {
        &self.net
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    pub fn episodes_done(&self) -> usize {
        self.records.len()
    }

    /// Plays one episode, updating the online network after every step once
    /// the buffer holds a batch, then syncs the target if the episode count
    /// hits the sync interval.
    pub fn run_episode(&mut self) -> Result<&EpisodeRecord, TrainError> {
        let (config, maze) = (&self.config, self.maze);
        let episode = self.records.len();
        let ep_start = Instant::now();
        let epsilon = config.epsilon.epsilon_at(episode);
        let mut state = reset(maze, None, &mut self.rng)?;
        let mut obs = encode_observation(maze, &state);
        while state.status() == Status::Ongoing && state.step_count() < config.max_steps_per_episode {
            let action = select_action(&self.net, &obs, epsilon, &mut self.rng)?;
            let reward = state.advance(maze, action)?;
            let next_obs = encode_observation(maze, &state);
            let done = state.status() != Status::Ongoing;
            self.buffer.push(Transition { state: obs, action, reward, next_state: next_obs.clone(), done });
            obs = next_obs;

            if self.buffer.len() >= config.batch_size {
                zero_grad(self.net.params_mut());
                let batch = self.buffer.sample_batch(config.batch_size, &mut self.rng)?;
                let loss = q_loss(&self.net, &self.target, &batch, config.gamma)?;
                loss.graph.backward(loss.loss, self.net.params_mut()).map_err(AgentError::from)?;
                self.optimizer.step(self.net.params_mut()).map_err(AgentError::from)?;
            }
        }
        self.records.push(EpisodeRecord {
            episode,
            reward: state.cumulative_reward(),
            steps: state.step_count(),
            epsilon,
            win: state.status() == Status::Win,
            ms: elapsed_ms(ep_start, config.record_timing),
        });
        if (episode + 1).is_multiple_of(config.target_sync_interval) {
            self.target.load_from(&self.net)?;
        }
        Ok(self.records.last().expect("just pushed"))
    }

    pub fn finish(self) -> (QNetwork, TrainReport) {
        let wins = self.records.iter().filter(|r| r.win).count();
        let report = TrainReport {
            win_rate_pct: win_rate_of(wins, self.records.len()),
            train_seconds: if self.config.record_timing { self.started.elapsed().as_secs_f64() } else { 0.0 },
            model_size: self.net.param_count(),
            records: self.records,
        };
        (self.net, report)
    }
}

/// Trains a fresh network on `maze` for `config.episodes` episodes. Each
/// episode starts on a random free cell; see [`DqnTrainer::run_episode`].
pub fn train(config: &TrainConfig, maze: &Maze) -> Result<(QNetwork, TrainReport), TrainError> {
    let mut trainer = DqnTrainer::new(config, maze)?;
    for _ in 0..config.episodes {
        trainer.run_episode()?;
    }
    Ok(trainer.finish())
}
