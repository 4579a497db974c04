use std::sync::Arc;

use super::{Coalition, CoalitionGame};
use crate::error::{Error, Result};

/// `v(u) = sum_k a_k v_k(u)` over games with the same player count.
#[derive(Clone)]
pub struct LinearCombination {
    terms: Vec<(f64, Arc<dyn CoalitionGame>)>,
    d: usize,
}

impl LinearCombination {
    pub fn new(terms: Vec<(f64, Arc<dyn CoalitionGame>)>) -> Result<Self> {
        let d = terms.first().map(|(_, g)| g.num_players()).ok_or_else(|| Error::invalid("empty combination"))?;
        if terms.iter().any(|(_, g)| g.num_players() != d) {
            return Err(Error::invalid("combined games must share a player count"));
        }
        Ok(Self { terms, d })
    }
}

impl CoalitionGame for LinearCombination {
    fn num_players(&self) -> usize {
        self.d
    }

    fn value(&self, coalition: &Coalition) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, (a, g)| Ok(acc + a * g.value(coalition)?))
    }

    fn name(&self) -> &str {
        "linear-combination"
    }

    fn exact_shapley(&self) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.d];
        for (a, g) in &self.terms {
            for (o, s) in out.iter_mut().zip(g.exact_shapley()?) {
                *o += a * s;
            }
        }
        Some(out)
    }

    fn is_pure(&self) -> bool {
        self.terms.iter().all(|(_, g)| g.is_pure())
    }
}
