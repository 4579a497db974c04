//! Variance-based sensitivity game for a linear model with Gaussian inputs.
//!
//! For `Y = b0 + beta' x` with `x ~ N(mu, Sigma)` the value of a coalition `u`
//! is the expected conditional variance `E[Var(Y | x_{u^c})]`. The conditional
//! covariance of `x_u` given `x_{u^c}` does not depend on the conditioning
//! value, so
//!
//! ```text
//! v(u) = beta_u' (Sigma_uu - Sigma_uc Sigma_cc^{-1} Sigma_cu) beta_u
//! ```

use super::{check_universe, Coalition, CoalitionGame};
use crate::error::{Error, Result};

/// Pivots below this fraction of the largest diagonal entry are rejected.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LinearGaussianGame {
    beta0: f64,
    beta: Vec<f64>,
    sigma: Vec<f64>,
    d: usize,
}

impl LinearGaussianGame {
    pub fn new(beta0: f64, beta: Vec<f64>, sigma: Vec<Vec<f64>>) -> Result<Self> {
        let d = beta.len();
        if d == 0 {
            return Err(Error::invalid("linear-Gaussian game needs at least one input"));
        }
        if sigma.len() != d || sigma.iter().any(|row| row.len() != d) {
            return Err(Error::invalid(format!("covariance must be {d}x{d} to match beta")));
        }
        let flat: Vec<f64> = sigma.into_iter().flatten().collect();
        if flat.iter().chain(&beta).any(|x| !x.is_finite()) || !beta0.is_finite() {
            return Err(Error::invalid("non-finite model parameter"));
        }
        let scale = flat.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..d {
            for j in 0..i {
                if (flat[i * d + j] - flat[j * d + i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::invalid(format!("covariance is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        cholesky(&flat, d)?;
        Ok(Self { beta0, beta, sigma: flat, d })
    }

    pub fn intercept(&self) -> f64 {
        self.beta0
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    fn sigma(&self, i: usize, j: usize) -> f64 {
        self.sigma[i * self.d + j]
    }

    /// `Var(Y) = beta' Sigma beta`.
    pub fn total_variance(&self) -> f64 {
        let all: Vec<usize> = (0..self.d).collect();
        self.quadratic(&all)
    }

    fn quadratic(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .map(|&i| self.beta[i] * idx.iter().map(|&j| self.sigma(i, j) * self.beta[j]).sum::<f64>())
            .sum()
    }
}

impl CoalitionGame for LinearGaussianGame {
    fn num_players(&self) -> usize {
        self.d
    }

    fn value(&self, coalition: &Coalition) -> Result<f64> {
        check_universe(self, coalition)?;
        let inside: Vec<usize> = coalition.iter().collect();
        if inside.is_empty() {
            return Ok(0.0);
        }
        let outside: Vec<usize> = (0..self.d).filter(|&i| !coalition.contains(i)).collect();
        let own = self.quadratic(&inside);
        if outside.is_empty() {
            return Ok(own);
        }
        let m = outside.len();
        let block: Vec<f64> = outside.iter().flat_map(|&a| outside.iter().map(move |&b| (a, b))).map(|(a, b)| self.sigma(a, b)).collect();
        let chol = cholesky(&block, m)?;
        // s = Sigma_cu beta_u, then y = L^{-1} s by forward substitution.
        let mut y: Vec<f64> = outside
            .iter()
            .map(|&a| inside.iter().map(|&b| self.sigma(a, b) * self.beta[b]).sum())
            .collect();
        for i in 0..m {
            let acc: f64 = (0..i).map(|k| chol[i * m + k] * y[k]).sum();
            y[i] = (y[i] - acc) / chol[i * m + i];
        }
        Ok(own - y.iter().map(|v| v * v).sum::<f64>())
    }

    fn name(&self) -> &str {
        "linear-gaussian"
    }
}

/// Lower-triangular Cholesky factor of the row-major `n x n` matrix `a`.
fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let largest = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let floor = PIVOT_TOLERANCE * largest;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let pivot = a[j * n + j] - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if pivot.is_nan() || pivot <= floor {
            return Err(Error::NotPositiveDefinite { index: j + 1, pivot });
        }
        let root = pivot.sqrt();
        l[j * n + j] = root;
        for i in j + 1..n {
            let s = a[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = s / root;
        }
    }
    Ok(l)
}

/// Covariance with the given variances on the diagonal and `pair_covariances[k]`
/// linking players `2k+1` and `2k+2` (1-based); all other entries are zero.
pub fn paired_covariance(variances: &[f64], pair_covariances: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = variances.len();
    if 2 * pair_covariances.len() > d {
        return Err(Error::invalid(format!("{} pairs do not fit in {d} inputs", pair_covariances.len())));
    }
    let mut sigma = vec![vec![0.0; d]; d];
    for (i, &v) in variances.iter().enumerate() {
        sigma[i][i] = v;
    }
    for (k, &c) in pair_covariances.iter().enumerate() {
        sigma[2 * k][2 * k + 1] = c;
        sigma[2 * k + 1][2 * k] = c;
    }
    Ok(sigma)
}
