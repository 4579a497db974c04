use super::{check_universe, Coalition, CoalitionGame};
use crate::error::{Error, Result};

/// Cost-sharing game where a coalition pays for the longest runway any member
/// needs: `v(u) = max_{i in u} w_i`.
#[derive(Clone, Debug)]
pub struct AirportGame {
    weights: Vec<f64>,
}

impl AirportGame {
    /// Weights may be given in any order; Shapley values are reported in the
    /// caller's label order.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("airport game needs at least one player"));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid(format!("weight of player {} is {w}; weights must be finite and nonnegative", i + 1)));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CoalitionGame for AirportGame {
    fn num_players(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, coalition: &Coalition) -> Result<f64> {
        check_universe(self, coalition)?;
        Ok(coalition.iter().map(|p| self.weights[p]).fold(0.0, f64::max))
    }

    fn name(&self) -> &str {
        "airport"
    }

    fn exact_shapley(&self) -> Option<Vec<f64>> {
        let mut order: Vec<usize> = (0..self.weights.len()).collect();
        order.sort_by(|&a, &b| self.weights[a].total_cmp(&self.weights[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| self.weights[i]).collect();
        let sh = airport_exact_shapley(&sorted).expect("sorted weights");
        let mut out = vec![0.0; sh.len()];
        for (rank, &player) in order.iter().enumerate() {
            out[player] = sh[rank];
        }
        Some(out)
    }
}

/// Closed form for nondecreasing weights:
/// `Sh_j = sum_{k <= j} (w_k - w_{k-1}) / (d + 1 - k)` with `w_0 = 0`.
pub fn airport_exact_shapley(sorted_weights: &[f64]) -> Result<Vec<f64>> {
    if sorted_weights.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("airport closed form needs nondecreasing weights"));
    }
    let d = sorted_weights.len();
    let mut prev = 0.0;
    let mut acc = 0.0;
    Ok(sorted_weights
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            acc += (w - prev) / (d - k) as f64;
            prev = w;
            acc
        })
        .collect())
}

/// The 101-user runway vector `(1 x8, 2 x10, 3 x7, 4 x13, 5 x12, 6 x11, 7 x10, 8 x15, 9 x10, 10 x5)`.
pub fn runway_weights_101() -> Vec<f64> {
    const COUNTS: [usize; 10] = [8, 10, 7, 13, 12, 11, 10, 15, 10, 5];
    COUNTS
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat((i + 1) as f64).take(n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_is_the_largest_member_weight() {
        let g = AirportGame::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.value(&Coalition::from_labels(3, &[1, 3]).unwrap()).unwrap(), 3.0);
        assert_eq!(g.value(&Coalition::empty(3)).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_small_case() {
        let sh = airport_exact_shapley(&[1.0, 2.0, 3.0]).unwrap();
        let expected = [1.0 / 3.0, 5.0 / 6.0, 11.0 / 6.0];
        for (a, b) in sh.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(airport_exact_shapley(&[2.0, 1.0]).is_err());
    }

    #[test]
    fn equal_weights_split_evenly() {
        let sh = airport_exact_shapley(&[4.0; 8]).unwrap();
        assert!(sh.iter().all(|&s| (s - 0.5).abs() < 1e-15));
    }

    #[test]
    fn runway_vector() {
        let w = runway_weights_101();
        assert_eq!(w.len(), 101);
        let g = AirportGame::new(w.clone()).unwrap();
        assert_eq!(g.value(&Coalition::full(101)).unwrap(), 10.0);
        let sh = airport_exact_shapley(&w).unwrap();
        assert!((sh[0] - 1.0 / 101.0).abs() < 1e-15);
        assert!((sh.iter().sum::<f64>() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn unsorted_weights_keep_caller_labels() {
        let g = AirportGame::new(vec![3.0, 1.0, 2.0]).unwrap();
        let sh = g.exact_shapley().unwrap();
        assert!((sh[0] - 11.0 / 6.0).abs() < 1e-15);
        assert!((sh[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((sh[2] - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn bad_weights() {
        assert!(AirportGame::new(vec![1.0, -0.5]).is_err());
        assert!(AirportGame::new(vec![f64::NAN]).is_err());
        assert!(AirportGame::new(vec![]).is_err());
    }
}
