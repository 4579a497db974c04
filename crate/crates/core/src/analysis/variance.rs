//! Exact variances of the SRS, Latin-square and COA estimators for small `d`,
//! by enumerating every permutation of the players.
//!
//! With `a(pi) = Delta(pi)_j - Sh_j` and `d!` orderings:
//!
//! ```text
//! Var_SRS(m) = sum_pi a(pi)^2 / (m d!)
//! Var_COA    = Var_SRS(d(d-1) nc) + (d(d-1) - 1) / (d(d-1) nc) * Cov_COA
//! Var_LS     = Var_SRS(d nc)      + (d - 1) / (d nc) * Cov_LS
//! ```
//!
//! `Cov_COA` averages `a(pi1) a(pi2)` over ordered pairs of distinct rows of the
//! same member of the COA partition family, and `Cov_LS` over ordered pairs of
//! permutations that agree in no position (there are `d! T(d)` of them).

use serde::Serialize;

use crate::designs::{all_permutations, coa_partition_family, derangement_pair_count, next_permutation, Permutation};
use crate::error::{Error, Result};
use crate::estimators::{Limits, NeumaierSum};
use crate::exec::map_indexed;
use crate::games::{Coalition, CoalitionGame};

/// Largest `d` for the Latin-square and COA pair sums.
pub const PAIR_LIMIT: usize = 7;

/// Pair spaces up to this `d` are enumerated by filtering all `d!^2` pairs;
/// larger ones are generated from derangements.
const FILTER_LIMIT: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    pub d: usize,
    /// Sample count used for `var_srs`.
    pub m: usize,
    /// Design count used for `var_ls` and `var_coa`.
    pub nc: usize,
    pub var_srs: Vec<f64>,
    pub var_ls: Vec<f64>,
    /// Absent when `d` is not a prime power.
    pub var_coa: Option<Vec<f64>>,
    pub cov_ls: Vec<f64>,
    pub cov_coa: Option<Vec<f64>>,
    pub t_d: u64,
}

/// Marginal contributions for every permutation, in lexicographic order.
struct Table {
    d: usize,
    deltas: Vec<f64>,
    shapley: Vec<f64>,
}

impl Table {
    fn build<G: CoalitionGame + ?Sized>(game: &G, limits: &Limits) -> Result<Self> {
        let d = game.num_players();
        if d == 0 {
            return Err(Error::invalid("game has no players"));
        }
        if d > limits.perm {
            return Err(Error::LimitExceeded { what: "exact variance enumeration", d, limit: limits.perm });
        }
        // Permutations starting with `first` form a contiguous lexicographic block.
        let blocks = map_indexed(d, |first| -> Result<Vec<f64>> {
            let mut rest: Vec<usize> = (0..d).filter(|&p| p != first).collect();
            let mut out = Vec::new();
            let mut coalition = Coalition::empty(d);
            loop {
                coalition.clear();
                let start = out.len();
                out.resize(start + d, 0.0);
                let mut pre = 0.0;
                for p in std::iter::once(first).chain(rest.iter().copied()) {
                    coalition.insert(p);
                    let v = game.value(&coalition)?;
                    out[start + p] = v - pre;
                    pre = v;
                }
                if !next_permutation(&mut rest) {
                    return Ok(out);
                }
            }
        });
        let mut deltas = Vec::new();
        for block in blocks {
            deltas.extend(block?);
        }
        let count = deltas.len() / d;
        let shapley = (0..d)
            .map(|j| {
                let mut s = NeumaierSum::default();
                (0..count).for_each(|i| s.add(deltas[i * d + j]));
                s.value() / count as f64
            })
            .collect();
        Ok(Table { d, deltas, shapley })
    }

    fn count(&self) -> usize {
        self.deltas.len() / self.d
    }

    #[inline]
    fn centered(&self, index: usize, j: usize) -> f64 {
        self.deltas[index * self.d + j] - self.shapley[j]
    }

    /// `sum_pi a(pi)^2 / d!` per player.
    fn population_variance(&self) -> Vec<f64> {
        (0..self.d)
            .map(|j| {
                let mut s = NeumaierSum::default();
                (0..self.count()).for_each(|i| s.add(self.centered(i, j).powi(2)));
                s.value() / self.count() as f64
            })
            .collect()
    }

    fn cov_coa(&self) -> Result<Vec<f64>> {
        let d = self.d;
        if d > PAIR_LIMIT {
            return Err(Error::LimitExceeded { what: "COA covariance", d, limit: PAIR_LIMIT });
        }
        let family = coa_partition_family(d)?;
        let rows = d * (d - 1);
        let mut cross = vec![NeumaierSum::default(); d];
        for design in &family {
            let index: Vec<usize> = design.rows().iter().map(|r| rank(r.players())).collect();
            for (j, acc) in cross.iter_mut().enumerate() {
                let (mut sum, mut sq) = (NeumaierSum::default(), NeumaierSum::default());
                for &i in &index {
                    let a = self.centered(i, j);
                    sum.add(a);
                    sq.add(a * a);
                }
                // sum over ordered pairs of distinct rows
                acc.add(sum.value().powi(2) - sq.value());
            }
        }
        let norm = (self.count() * (rows - 1)) as f64;
        Ok(cross.iter().map(|c| c.value() / norm).collect())
    }

    fn cov_ls(&self, pairs: PairSource) -> Result<Vec<f64>> {
        let d = self.d;
        if !(2..=PAIR_LIMIT).contains(&d) {
            return Err(Error::LimitExceeded { what: "Latin-square covariance", d, limit: PAIR_LIMIT });
        }
        let t = derangement_pair_count(d)? as usize;
        let perms = all_permutations(d);
        let mut acc = vec![NeumaierSum::default(); d];
        let mut seen = 0usize;
        let mut visit = |i1: usize, i2: usize| {
            seen += 1;
            for (j, s) in acc.iter_mut().enumerate() {
                s.add(self.centered(i1, j) * self.centered(i2, j));
            }
        };
        match pairs {
            PairSource::Filter => {
                for (i1, p1) in perms.iter().enumerate() {
                    for (i2, p2) in perms.iter().enumerate() {
                        if p1.players().iter().zip(p2.players()).all(|(a, b)| a != b) {
                            visit(i1, i2);
                        }
                    }
                }
            }
            PairSource::Derangements => {
                // pi2 = tau o pi1 with tau fixing no label
                let taus: Vec<&Permutation> =
                    perms.iter().filter(|t| t.players().iter().enumerate().all(|(x, &y)| x != y)).collect();
                let mut image = vec![0; d];
                for (i1, p1) in perms.iter().enumerate() {
                    for tau in &taus {
                        for (slot, &x) in image.iter_mut().zip(p1.players()) {
                            *slot = tau.players()[x];
                        }
                        visit(i1, rank(&image));
                    }
                }
            }
        }
        let total = perms.len() * t;
        if seen != total {
            return Err(Error::invalid(format!("enumerated {seen} position-discordant pairs, expected {total}")));
        }
        Ok(acc.iter().map(|s| s.value() / total as f64).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairSource {
    Filter,
    Derangements,
}

fn pair_source(d: usize) -> PairSource {
    if d <= FILTER_LIMIT {
        PairSource::Filter
    } else {
        PairSource::Derangements
    }
}

/// Lexicographic rank of a permutation of `0..n`.
fn rank(players: &[usize]) -> usize {
    let n = players.len();
    let mut r = 0;
    for i in 0..n {
        let smaller = players[i + 1..].iter().filter(|&&q| q < players[i]).count();
        r = r * (n - i) + smaller;
    }
    r
}

fn check_count(what: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(format!("{what} must be at least 1")));
    }
    Ok(())
}

/// Exact variance of the SRS estimator with `m` permutations.
pub fn var_srs_exact<G: CoalitionGame + ?Sized>(game: &G, m: usize, limits: &Limits) -> Result<Vec<f64>> {
    check_count("sample count", m)?;
    let table = Table::build(game, limits)?;
    Ok(table.population_variance().iter().map(|v| v / m as f64).collect())
}

/// `Cov_COA` per player; `d` must be a prime power in `3..=7`.
pub fn cov_coa_exact<G: CoalitionGame + ?Sized>(game: &G, limits: &Limits) -> Result<Vec<f64>> {
    Table::build(game, limits)?.cov_coa()
}

/// `Cov_LS` per player, for `2 <= d <= 7`.
pub fn cov_ls_exact<G: CoalitionGame + ?Sized>(game: &G, limits: &Limits) -> Result<Vec<f64>> {
    let table = Table::build(game, limits)?;
    table.cov_ls(pair_source(table.d))
}

/// Exact variance of the COA estimator with `nc` designs.
pub fn var_coa_exact<G: CoalitionGame + ?Sized>(game: &G, nc: usize, limits: &Limits) -> Result<Vec<f64>> {
    check_count("design count", nc)?;
    let table = Table::build(game, limits)?;
    let cov = table.cov_coa()?;
    Ok(assemble_coa(table.d, nc, &table.population_variance(), &cov))
}

/// Exact variance of the Latin-square estimator with `nc` squares, assuming
/// the rows of a square are a uniform draw from the position-discordant pairs.
pub fn var_ls_exact<G: CoalitionGame + ?Sized>(game: &G, nc: usize, limits: &Limits) -> Result<Vec<f64>> {
    check_count("design count", nc)?;
    let table = Table::build(game, limits)?;
    let cov = table.cov_ls(pair_source(table.d))?;
    Ok(assemble_ls(table.d, nc, &table.population_variance(), &cov))
}

fn assemble_coa(d: usize, nc: usize, population: &[f64], cov: &[f64]) -> Vec<f64> {
    let r = (d * (d - 1)) as f64;
    let n = nc as f64;
    population.iter().zip(cov).map(|(p, c)| p / (r * n) + (r - 1.0) / (r * n) * c).collect()
}

fn assemble_ls(d: usize, nc: usize, population: &[f64], cov: &[f64]) -> Vec<f64> {
    let (d, n) = (d as f64, nc as f64);
    population.iter().zip(cov).map(|(p, c)| p / (d * n) + (d - 1.0) / (d * n) * c).collect()
}

/// All three exact variances from a single enumeration.
pub fn variance_report<G: CoalitionGame + ?Sized>(game: &G, m: usize, nc: usize, limits: &Limits) -> Result<VarianceReport> {
    check_count("sample count", m)?;
    check_count("design count", nc)?;
    let table = Table::build(game, limits)?;
    let d = table.d;
    let population = table.population_variance();
    let cov_ls = table.cov_ls(pair_source(d))?;
    let cov_coa = match table.cov_coa() {
        Ok(c) => Some(c),
        Err(Error::NotPrimePower(_)) => None,
        Err(Error::InvalidArgument(_)) if d < 3 => None,
        Err(e) => return Err(e),
    };
    Ok(VarianceReport {
        d,
        m,
        nc,
        var_srs: population.iter().map(|v| v / m as f64).collect(),
        var_ls: assemble_ls(d, nc, &population, &cov_ls),
        var_coa: cov_coa.as_ref().map(|c| assemble_coa(d, nc, &population, c)),
        cov_ls,
        cov_coa,
        t_d: derangement_pair_count(d)? as u64,
    })
}
