//! Cooperative games: a value function over coalitions of players with
//! `v(empty) = 0`, plus an exact Shapley oracle where a closed form exists.

mod additive;
mod airport;
mod combination;
mod connectivity;
mod gaussian;
mod graph;
mod registry;
mod voting;

pub use additive::AdditiveGame;
pub use airport::{airport_exact_shapley, runway_weights_101, AirportGame};
pub use combination::LinearCombination;
pub use connectivity::ConnectivityGame;
pub use gaussian::{paired_covariance, LinearGaussianGame};
pub use graph::{load_graph, Graph};
pub use registry::{build_game, load_matrix, load_vector, parse_matrix, parse_vector, GAME_NAMES};
pub use voting::VotingGame;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// A subset of the players `0..universe`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    universe: usize,
    words: Vec<u64>,
}

impl Coalition {
    pub fn empty(universe: usize) -> Self {
        Self { universe, words: vec![0; universe.div_ceil(64).max(1)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut c = Self::empty(universe);
        for p in 0..universe {
            c.insert(p);
        }
        c
    }

    /// From 0-based players.
    pub fn from_players(universe: usize, players: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut c = Self::empty(universe);
        for p in players {
            if p >= universe {
                return Err(Error::InvalidCoalition(format!("player {} outside 1..={universe}", p + 1)));
            }
            if c.contains(p) {
                return Err(Error::InvalidCoalition(format!("player {} listed twice", p + 1)));
            }
            c.insert(p);
        }
        Ok(c)
    }

    /// From 1-based labels.
    pub fn from_labels(universe: usize, labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidCoalition("labels are 1-based".into()));
        }
        Self::from_players(universe, labels.iter().map(|&l| l - 1))
    }

    /// From the low `universe` bits of `mask`; requires `universe <= 64`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        debug_assert!(universe <= 64 && (universe == 64 || mask >> universe == 0));
        let mut c = Self::empty(universe);
        c.words[0] = mask;
        c
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn insert(&mut self, player: usize) {
        assert!(player < self.universe, "player {player} outside a universe of {}", self.universe);
        self.words[player / 64] |= 1 << (player % 64);
    }

    #[inline]
    pub fn remove(&mut self, player: usize) {
        if player < self.universe {
            self.words[player / 64] &= !(1 << (player % 64));
        }
    }

    #[inline]
    pub fn contains(&self, player: usize) -> bool {
        player < self.universe && self.words[player / 64] & (1 << (player % 64)) != 0
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order, 0-based.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// Members in ascending order, 1-based.
    pub fn labels(&self) -> Vec<usize> {
        self.iter().map(|p| p + 1).collect()
    }

    /// The bitset as a single word, when the universe fits in one.
    pub fn mask(&self) -> Option<u64> {
        (self.universe <= 64).then(|| self.words[0])
    }

    pub fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels()).finish()
    }
}

/// A cooperative game on players `0..num_players()`.
pub trait CoalitionGame: Send + Sync {
    fn num_players(&self) -> usize;

    /// The value of `coalition`. The empty coalition must be worth 0.
    fn value(&self, coalition: &Coalition) -> Result<f64>;

    fn name(&self) -> &str {
        "game"
    }

    /// Closed-form Shapley values, when known.
    fn exact_shapley(&self) -> Option<Vec<f64>> {
        None
    }

    /// Deterministic evaluation: equal coalitions give bit-identical values.
    fn is_pure(&self) -> bool {
        true
    }
}

impl<G: CoalitionGame + ?Sized> CoalitionGame for &G {
    fn num_players(&self) -> usize {
        (**self).num_players()
    }
    fn value(&self, coalition: &Coalition) -> Result<f64> {
        (**self).value(coalition)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn exact_shapley(&self) -> Option<Vec<f64>> {
        (**self).exact_shapley()
    }
    fn is_pure(&self) -> bool {
        (**self).is_pure()
    }
}

impl<G: CoalitionGame + ?Sized> CoalitionGame for Box<G> {
    fn num_players(&self) -> usize {
        (**self).num_players()
    }
    fn value(&self, coalition: &Coalition) -> Result<f64> {
        (**self).value(coalition)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn exact_shapley(&self) -> Option<Vec<f64>> {
        (**self).exact_shapley()
    }
    fn is_pure(&self) -> bool {
        (**self).is_pure()
    }
}

pub(crate) fn check_universe(game: &dyn CoalitionGame, coalition: &Coalition) -> Result<()> {
    if coalition.universe() != game.num_players() {
        return Err(Error::InvalidCoalition(format!(
            "coalition over {} players passed to a {}-player game",
            coalition.universe(),
            game.num_players()
        )));
    }
    Ok(())
}

/// Probes `v(empty) = 0` and, for pure games, repeatability of `v(full)`.
pub fn validate_game<G: CoalitionGame + ?Sized>(game: &G) -> Result<()> {
    let d = game.num_players();
    let empty = game.value(&Coalition::empty(d))?;
    if empty != 0.0 {
        return Err(Error::invalid(format!("{}: v(empty) = {empty}, expected 0", game.name())));
    }
    if game.is_pure() {
        let full = Coalition::full(d);
        let (a, b) = (game.value(&full)?, game.value(&full)?);
        if a.to_bits() != b.to_bits() {
            return Err(Error::invalid(format!("{} is flagged pure but v(full) is not repeatable", game.name())));
        }
    }
    Ok(())
}

/// A game backed by a closure.
pub struct FnGame<F> {
    name: String,
    d: usize,
    f: F,
    pure: bool,
}

impl<F> FnGame<F>
where
    F: Fn(&Coalition) -> f64 + Send + Sync,
{
    /// Wraps a deterministic value function, checking `v(empty) = 0`.
    pub fn new(name: impl Into<String>, d: usize, f: F) -> Result<Self> {
        let game = Self { name: name.into(), d, f, pure: true };
        validate_game(&game)?;
        Ok(game)
    }

    /// Wraps a stochastic value function.
    pub fn stochastic(name: impl Into<String>, d: usize, f: F) -> Result<Self> {
        let game = Self { name: name.into(), d, f, pure: false };
        validate_game(&game)?;
        Ok(game)
    }
}

impl<F> CoalitionGame for FnGame<F>
where
    F: Fn(&Coalition) -> f64 + Send + Sync,
{
    fn num_players(&self) -> usize {
        self.d
    }
    fn value(&self, coalition: &Coalition) -> Result<f64> {
        check_universe(self, coalition)?;
        Ok((self.f)(coalition))
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn is_pure(&self) -> bool {
        self.pure
    }
}

/// Wraps a game and records every evaluation it receives.
pub struct Instrumented<G> {
    inner: G,
    calls: AtomicU64,
    largest_size: AtomicUsize,
    foreign_universe: AtomicBool,
}

impl<G: CoalitionGame> Instrumented<G> {
    pub fn new(inner: G) -> Self {
        Self {
            inner,
            calls: AtomicU64::new(0),
            largest_size: AtomicUsize::new(0),
            foreign_universe: AtomicBool::new(false),
        }
    }

    /// Number of value evaluations so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Largest coalition evaluated so far.
    pub fn largest_coalition(&self) -> usize {
        self.largest_size.load(Ordering::Relaxed)
    }

    /// True if any evaluated coalition had a player outside `0..d` or a
    /// universe other than the game's.
    pub fn saw_foreign_player(&self) -> bool {
        self.foreign_universe.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
        self.largest_size.store(0, Ordering::Relaxed);
        self.foreign_universe.store(false, Ordering::Relaxed);
    }

    pub fn into_inner(self) -> G {
        self.inner
    }
}

impl<G: CoalitionGame> CoalitionGame for Instrumented<G> {
    fn num_players(&self) -> usize {
        self.inner.num_players()
    }
    fn value(&self, coalition: &Coalition) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.largest_size.fetch_max(coalition.len(), Ordering::Relaxed);
        let d = self.inner.num_players();
        if coalition.universe() != d || coalition.highest().is_some_and(|p| p >= d) {
            self.foreign_universe.store(true, Ordering::Relaxed);
        }
        self.inner.value(coalition)
    }
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn exact_shapley(&self) -> Option<Vec<f64>> {
        self.inner.exact_shapley()
    }
    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }
}
