use super::{check_universe, Coalition, CoalitionGame};
use crate::error::Result;

/// `v(u) = sum_{i in u} c_i`; every marginal contribution of `j` is `c_j`.
#[derive(Clone, Debug)]
pub struct AdditiveGame {
    c: Vec<f64>,
}

impl AdditiveGame {
    pub fn new(c: Vec<f64>) -> Self {
        Self { c }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }
}

impl CoalitionGame for AdditiveGame {
    fn num_players(&self) -> usize {
        self.c.len()
    }

    fn value(&self, coalition: &Coalition) -> Result<f64> {
        check_universe(self, coalition)?;
        Ok(coalition.iter().map(|p| self.c[p]).sum())
    }

    fn name(&self) -> &str {
        "additive"
    }

    fn exact_shapley(&self) -> Option<Vec<f64>> {
        Some(self.c.clone())
    }
}
