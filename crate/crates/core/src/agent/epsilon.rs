use serde::{Deserialize, Serialize};

use super::AgentError;

/// Exponential decay `end + (start - end) * exp(-episode / tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    /// Time constant in episodes.
    pub tau: f64,
}

impl EpsilonSchedule {
    pub fn new(start: f64, end: f64, tau: f64) -> Result<Self, AgentError> {
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || end > start {
            return Err(AgentError::Config(format!("epsilon bounds must satisfy 0 <= end <= start <= 1, got {start}, {end}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(AgentError::Config(format!("epsilon tau must be positive, got {tau}")));
        }
        Ok(Self { start, end, tau })
    }

    /// Default profile for a run of `episodes` episodes: 1.0 decaying to 0.05
    /// with a time constant of a fifth of the run.
    pub fn for_episodes(episodes: usize) -> Self {
        Self { start: 1.0, end: 0.05, tau: (episodes as f64 / 5.0).max(1.0) }
    }

    pub fn epsilon_at(&self, episode: usize) -> f64 {
        self.end + (self.start - self.end) * (-(episode as f64) / self.tau).exp()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn endpoints() {
        let s = EpsilonSchedule::new(1.0, 0.05, 100.0).unwrap();
        assert_eq!(s.epsilon_at(0), 1.0);
        assert!((s.epsilon_at(100) - (0.05 + 0.95 * (-1.0f64).exp())).abs() < 1e-15);
        assert!((s.epsilon_at(100) - 0.3995).abs() < 1e-4);
        assert!((s.epsilon_at(1_000_000) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn invalid_schedules() {
        assert!(EpsilonSchedule::new(0.1, 0.5, 10.0).is_err());
        assert!(EpsilonSchedule::new(1.5, 0.5, 10.0).is_err());
        assert!(EpsilonSchedule::new(1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(start in 0.0f64..=1.0, frac in 0.0f64..=1.0, tau in 0.1f64..1e4, ep in 0usize..100_000) {
            let s = EpsilonSchedule::new(start, start * frac, tau).unwrap();
            let (a, b) = (s.epsilon_at(ep), s.epsilon_at(ep + 1));
            prop_assert!(b <= a);
            prop_assert!(a <= s.start && a >= s.end);
        }
    }
}
