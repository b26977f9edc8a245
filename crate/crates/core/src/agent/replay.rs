use rand::seq::index;
use rand::Rng;

use super::AgentError;
use crate::env::{Action, Observation};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Observation,
    pub action: Action,
    pub reward: f64,
    pub next_state: Observation,
    pub done: bool,
}

/// Fixed-capacity ring buffer of transitions; the oldest entry is overwritten
/// once full.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self, AgentError> {
        if capacity == 0 {
            return Err(AgentError::Config("replay capacity must be positive".into()));
        }
        Ok(Self { capacity, items: Vec::with_capacity(capacity.min(1 << 16)), cursor: 0 })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// `k` distinct transitions chosen uniformly at random.
    pub fn sample_batch<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Vec<&Transition>, AgentError> {
        if k > self.items.len() {
            return Err(AgentError::InsufficientData { requested: k, available: self.items.len() });
        }
        Ok(index::sample(rng, self.items.len(), k).into_iter().map(|i| &self.items[i]).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::env::{observe_at, Cell, Maze};

    fn tr(reward: f64) -> Transition {
        let maze = Maze::shipped(3).unwrap();
        let obs = observe_at(&maze, Cell::new(0, 0));
        Transition { state: obs.clone(), action: Action::Right, reward, next_state: obs, done: false }
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut buf = ReplayBuffer::new(3).unwrap();
        for i in 0..5 {
            buf.push(tr(i as f64));
            assert!(buf.len() <= 3);
        }
        let mut rewards: Vec<f64> = buf.iter().map(|t| t.reward).collect();
        rewards.sort_by(f64::total_cmp);
        assert_eq!(rewards, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn sampling_without_replacement() {
        let mut buf = ReplayBuffer::new(10).unwrap();
        for i in 0..10 {
            buf.push(tr(i as f64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = buf.sample_batch(10, &mut rng).unwrap();
        let mut seen: Vec<f64> = batch.iter().map(|t| t.reward).collect();
        seen.sort_by(f64::total_cmp);
        seen.dedup();
        assert_eq!(seen.len(), 10);

        let a: Vec<f64> = buf.sample_batch(4, &mut ChaCha8Rng::seed_from_u64(7)).unwrap().iter().map(|t| t.reward).collect();
        let b: Vec<f64> = buf.sample_batch(4, &mut ChaCha8Rng::seed_from_u64(7)).unwrap().iter().map(|t| t.reward).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn insufficient_data() {
        let mut buf = ReplayBuffer::new(4).unwrap();
        buf.push(tr(0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            buf.sample_batch(2, &mut rng),
            Err(AgentError::InsufficientData { requested: 2, available: 1 })
        ));
        assert!(ReplayBuffer::new(0).is_err());
    }
}
