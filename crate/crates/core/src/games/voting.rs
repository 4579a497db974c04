use super::{check_universe, Coalition, CoalitionGame};
use crate::error::{Error, Result};

/// Symmetric majority game on an even number of players: a coalition wins
/// (value 1) when it holds more than half the players.
#[derive(Clone, Debug)]
pub struct VotingGame {
    d: usize,
}

impl VotingGame {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return Err(Error::invalid(format!("voting game needs an even d >= 2, got {d}")));
        }
        Ok(Self { d })
    }
}

impl CoalitionGame for VotingGame {
    fn num_players(&self) -> usize {
        self.d
    }

    fn value(&self, coalition: &Coalition) -> Result<f64> {
        check_universe(self, coalition)?;
        Ok(if coalition.len() > self.d / 2 { 1.0 } else { 0.0 })
    }

    fn name(&self) -> &str {
        "voting"
    }

    fn exact_shapley(&self) -> Option<Vec<f64>> {
        Some(vec![1.0 / self.d as f64; self.d])
    }
}
