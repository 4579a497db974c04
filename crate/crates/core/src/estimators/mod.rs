//! Shapley computation: exact oracles and design-based permutation estimators.
//!
//! Every path runs the same marginal-contribution scan: walk a permutation,
//! add one player at a time, and credit each player with the jump in value.
//! One scan costs exactly `d` evaluations of the game.

mod exact;
mod sampling;

pub use exact::{exact_shapley_permutation, exact_shapley_subset};
pub use sampling::{estimate_coa, estimate_coa_padded, estimate_ls, estimate_srs};

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::designs::Permutation;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::games::{Coalition, CoalitionGame};

/// Environment variable that may raise the enumeration limits, e.g.
/// `perm=10,subset=22`.
pub const LIMITS_ENV: &str = "SHAPLEY_DESIGNS_LIMITS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    ExactPerm,
    ExactSubset,
    Srs,
    Ls,
    Coa,
    CoaPad,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::ExactPerm, Method::ExactSubset, Method::Srs, Method::Ls, Method::Coa, Method::CoaPad];

    /// Tag used in reports, e.g. `COA_PAD`.
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactPerm => "EXACT_PERM",
            Method::ExactSubset => "EXACT_SUBSET",
            Method::Srs => "SRS",
            Method::Ls => "LS",
            Method::Coa => "COA",
            Method::CoaPad => "COA_PAD",
        }
    }

    /// Command-line spelling, e.g. `coa-pad`.
    pub fn token(self) -> &'static str {
        match self {
            Method::ExactPerm => "exact-perm",
            Method::ExactSubset => "exact-subset",
            Method::Srs => "srs",
            Method::Ls => "ls",
            Method::Coa => "coa",
            Method::CoaPad => "coa-pad",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Method::ExactPerm | Method::ExactSubset)
    }

    /// Permutations contributed by one design for a `d`-player game, for the
    /// design-based methods.
    pub fn rows_per_design(self, d: usize) -> Result<Option<usize>> {
        Ok(match self {
            Method::Ls => Some(d),
            Method::Coa => Some(d * d.saturating_sub(1)),
            Method::CoaPad => {
                let star = padded_order(d)?;
                Some(star * (star - 1))
            }
            _ => None,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.token() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

/// Accepts either spelling, `COA_PAD` or `coa-pad`.
impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Padding target for `d` players: the smallest prime power that is at least
/// `max(d, 3)`.
pub fn padded_order(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::invalid(format!("padding needs d >= 2, got {d}")));
    }
    Ok(crate::galois::next_prime_power(d.max(3) as u64)? as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapleyEstimate {
    /// One value per original player.
    pub values: Vec<f64>,
    pub method: Method,
    /// Permutations scanned (`m`); for the subset oracle, coalitions visited.
    pub permutations: u64,
    pub evaluations: u64,
    pub seed: Option<u64>,
    pub elapsed: Duration,
    pub d_star: Option<usize>,
}

impl ShapleyEstimate {
    pub fn total(&self) -> f64 {
        let mut s = NeumaierSum::default();
        self.values.iter().for_each(|&v| s.add(v));
        s.value()
    }
}

/// Compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Enumeration limits for the exact oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest `d` for full permutation enumeration.
    pub perm: usize,
    /// Largest `d` for the subset-sum oracle.
    pub subset: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { perm: 9, subset: 20 }
    }
}

impl Limits {
    /// Hard ceilings that no override may pass.
    pub const MAX_PERM: usize = 12;
    pub const MAX_SUBSET: usize = 30;

    /// Defaults, raised by [`LIMITS_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(LIMITS_ENV) {
            Ok(text) => Limits::default().with_overrides(&text),
            Err(std::env::VarError::NotPresent) => Ok(Limits::default()),
            Err(e) => Err(Error::invalid(format!("{LIMITS_ENV}: {e}"))),
        }
    }

    /// Applies `key=value` pairs separated by commas; keys are `perm` and `subset`.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) =
                item.split_once('=').ok_or_else(|| Error::invalid(format!("limit `{item}` is not key=value")))?;
            let value: usize =
                value.trim().parse().map_err(|e| Error::invalid(format!("limit `{item}`: {e}")))?;
            match key.trim() {
                "perm" => self.perm = value,
                "subset" => self.subset = value,
                other => return Err(Error::invalid(format!("unknown limit `{other}`"))),
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.perm > Self::MAX_PERM || self.subset > Self::MAX_SUBSET {
            return Err(Error::invalid(format!(
                "limits perm={} subset={} exceed the ceilings perm={} subset={}",
                self.perm,
                self.subset,
                Self::MAX_PERM,
                Self::MAX_SUBSET
            )));
        }
        Ok(())
    }
}

/// Running-prefix scan state for one worker.
pub(crate) struct Scanner {
    coalition: Coalition,
    totals: Vec<NeumaierSum>,
}

impl Scanner {
    pub(crate) fn new(d: usize) -> Self {
        Scanner { coalition: Coalition::empty(d), totals: vec![NeumaierSum::default(); d] }
    }

    /// Adds the marginal contributions along `order` to the totals and returns
    /// the number of evaluations spent.
    #[inline]
    pub(crate) fn scan<G, I>(&mut self, game: &G, order: I) -> Result<u64>
    where
        G: CoalitionGame + ?Sized,
        I: IntoIterator<Item = usize>,
    {
        self.coalition.clear();
        let mut pre = 0.0;
        let mut calls = 0;
        for player in order {
            self.coalition.insert(player);
            let v = game.value(&self.coalition)?;
            self.totals[player].add(v - pre);
            pre = v;
            calls += 1;
        }
        Ok(calls)
    }
}

/// Runs `tasks` independent scan tasks and merges their totals in task order.
/// Returns the per-player totals and the evaluation count.
pub(crate) fn run_tasks<F>(d: usize, tasks: usize, task: F) -> Result<(Vec<f64>, u64)>
where
    F: Fn(usize, &mut Scanner) -> Result<u64> + Sync + Send,
{
    let parts = map_indexed(tasks, |t| {
        let mut scanner = Scanner::new(d);
        task(t, &mut scanner).map(|calls| (scanner.totals, calls))
    });
    let mut totals = vec![NeumaierSum::default(); d];
    let mut calls = 0;
    for part in parts {
        let (partial, n) = part?;
        for (acc, p) in totals.iter_mut().zip(&partial) {
            acc.merge(p);
        }
        calls += n;
    }
    Ok((totals.iter().map(NeumaierSum::value).collect(), calls))
}

/// Marginal contribution of every player along `order`, with `d` evaluations.
pub fn marginal_contributions<G: CoalitionGame + ?Sized>(game: &G, order: &Permutation) -> Result<Vec<f64>> {
    let d = game.num_players();
    if order.len() != d {
        return Err(Error::InvalidPermutation(format!("{order} has {} players, game has {d}", order.len())));
    }
    let mut out = vec![0.0; d];
    let mut coalition = Coalition::empty(d);
    let mut pre = 0.0;
    for &player in order.players() {
        coalition.insert(player);
        let v = game.value(&coalition)?;
        out[player] = v - pre;
        pre = v;
    }
    Ok(out)
}

/// Dispatches to the method's estimator. `size` is the permutation count for
/// SRS and the design count for LS/COA/COA_PAD; exact methods ignore it and the seed.
pub fn estimate<G: CoalitionGame + ?Sized>(
    method: Method,
    game: &G,
    size: usize,
    seed: u64,
    limits: &Limits,
) -> Result<ShapleyEstimate> {
    match method {
        Method::ExactPerm => exact_shapley_permutation(game, limits),
        Method::ExactSubset => exact_shapley_subset(game, limits),
        Method::Srs => estimate_srs(game, size, seed),
        Method::Ls => estimate_ls(game, size, seed),
        Method::Coa => estimate_coa(game, size, seed),
        Method::CoaPad => estimate_coa_padded(game, size, seed),
    }
}
