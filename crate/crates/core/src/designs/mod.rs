//! Order-of-addition designs: arrays whose rows are permutations of the players.
//!
//! Players are stored 0-based internally. Everything that leaves the crate
//! (CSV files, reports, [`Permutation::labels`]) speaks 1-based labels.

pub(crate) mod coa;
mod io;
pub(crate) mod latin;

pub use coa::{coa_base, coa_partition_family, coa_random, coa_with_columns, COA_FAMILY_LIMIT};
pub use io::{read_design_csv, write_design_csv};
pub use latin::{check_latin, ls_cyclic, ls_permuted, ls_random};

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::stream_rng;

/// An ordering of players `0..d`; one run of a design.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    /// From 0-based players in run order.
    pub fn from_players(players: Vec<usize>) -> Result<Self> {
        let d = players.len();
        let mut seen = vec![false; d];
        for &p in &players {
            if p >= d || seen[p] {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not an ordering of 0..{d}",
                    players
                )));
            }
            seen[p] = true;
        }
        Ok(Permutation(players))
    }

    /// From 1-based labels in run order.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidPermutation(format!("labels are 1-based, got {labels:?}")));
        }
        Self::from_players(labels.iter().map(|&l| l - 1).collect())
    }

    pub(crate) fn from_players_unchecked(players: Vec<usize>) -> Self {
        debug_assert!(Self::from_players(players.clone()).is_ok());
        Permutation(players)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based players in run order.
    pub fn players(&self) -> &[usize] {
        &self.0
    }

    /// 1-based labels in run order.
    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|&p| p + 1).collect()
    }

    /// `positions()[p]` is the 0-based position of player `p`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            pos[p] = i;
        }
        pos
    }

    /// Players strictly before `player`.
    pub fn predecessors(&self, player: usize) -> &[usize] {
        let at = self.0.iter().position(|&p| p == player).unwrap_or(self.0.len());
        &self.0[..at]
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Coa,
    Ls,
    Raw,
}

impl DesignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignKind::Coa => "coa",
            DesignKind::Ls => "ls",
            DesignKind::Raw => "raw",
        }
    }
}

/// How a design was produced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub base: String,
    pub seed: Option<u64>,
    /// 0-based source column for each output column.
    pub column_permutation: Option<Vec<usize>>,
    /// 0-based source row for each output row.
    pub row_permutation: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OofADesign {
    kind: DesignKind,
    d: usize,
    rows: Vec<Permutation>,
    lambda: Option<usize>,
    provenance: Provenance,
}

impl OofADesign {
    /// A design of unchecked structure; rows must still be permutations of `0..d`.
    pub fn raw(d: usize, rows: Vec<Permutation>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::InvalidDesign(format!("row {bad} does not have {d} entries")));
        }
        Ok(Self {
            kind: DesignKind::Raw,
            d,
            rows,
            lambda: None,
            provenance: Provenance { base: "raw".into(), ..Provenance::default() },
        })
    }

    /// Reinterprets the rows as a design of `kind`, verifying its structure.
    pub fn with_kind(mut self, kind: DesignKind) -> Result<Self> {
        match kind {
            DesignKind::Coa => match check_coa_balance(&self)? {
                BalanceReport::Balanced { lambda } => self.lambda = Some(lambda),
                report @ BalanceReport::Unbalanced { .. } => {
                    return Err(Error::InvalidDesign(format!("not a COA: {report}")))
                }
            },
            DesignKind::Ls => {
                if !check_latin(&self) {
                    return Err(Error::InvalidDesign("not a Latin square".into()));
                }
                self.lambda = None;
            }
            DesignKind::Raw => self.lambda = None,
        }
        self.kind = kind;
        Ok(self)
    }

    pub(crate) fn from_parts(
        kind: DesignKind,
        d: usize,
        rows: Vec<Permutation>,
        lambda: Option<usize>,
        provenance: Provenance,
    ) -> Self {
        Self { kind, d, rows, lambda, provenance }
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[Permutation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// COA index; `None` for other kinds.
    pub fn lambda(&self) -> Option<usize> {
        self.lambda
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Outcome of [`check_coa_balance`]. Columns and labels are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BalanceReport {
    Balanced {
        lambda: usize,
    },
    Unbalanced {
        columns: (usize, usize),
        labels: (usize, usize),
        count: usize,
        expected: usize,
    },
}

impl BalanceReport {
    pub fn lambda(&self) -> Option<usize> {
        match self {
            BalanceReport::Balanced { lambda } => Some(*lambda),
            BalanceReport::Unbalanced { .. } => None,
        }
    }
}

impl fmt::Display for BalanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BalanceReport::Balanced { lambda } => write!(f, "balanced with lambda = {lambda}"),
            BalanceReport::Unbalanced { columns, labels, count, expected } => write!(
                f,
                "labels ({}, {}) appear {count} times in columns ({}, {}), expected {expected}",
                labels.0, labels.1, columns.0, columns.1
            ),
        }
    }
}

/// Checks that every ordered label pair appears equally often in every ordered
/// column pair.
pub fn check_coa_balance(design: &OofADesign) -> Result<BalanceReport> {
    let d = design.d();
    if design.is_empty() {
        return Err(Error::InvalidDesign("balance check needs at least one row".into()));
    }
    if d < 2 {
        return Err(Error::InvalidDesign("balance check needs at least two columns".into()));
    }
    let pairs = d * (d - 1);
    let expected = design.len() / pairs;
    let mut counts = vec![0usize; d * d];
    for c1 in 0..d {
        for c2 in 0..d {
            if c1 == c2 {
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for row in design.rows() {
                let p = row.players();
                counts[p[c1] * d + p[c2]] += 1;
            }
            for i in 0..d {
                for j in 0..d {
                    let count = counts[i * d + j];
                    if i != j && (count != expected || design.len() % pairs != 0) {
                        return Ok(BalanceReport::Unbalanced {
                            columns: (c1 + 1, c2 + 1),
                            labels: (i + 1, j + 1),
                            count,
                            expected,
                        });
                    }
                }
            }
        }
    }
    Ok(BalanceReport::Balanced { lambda: expected })
}

/// `m` independent uniform permutations of `0..d`; permutation `i` is drawn
/// from stream `i` of `seed`.
pub fn srs_permutations(d: usize, m: usize, seed: u64) -> Result<Vec<Permutation>> {
    if d == 0 || m == 0 {
        return Err(Error::invalid("SRS sampling needs d >= 1 and m >= 1"));
    }
    Ok(crate::exec::map_indexed(m, |i| srs_permutation(d, seed, i as u64)))
}

pub(crate) fn srs_permutation(d: usize, seed: u64, index: u64) -> Permutation {
    let mut rng = stream_rng(seed, index);
    let mut players: Vec<usize> = (0..d).collect();
    players.shuffle(&mut rng);
    Permutation::from_players_unchecked(players)
}

pub(crate) fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// T(d): the number of permutations that agree with a fixed reference
/// permutation in no position, `d! * sum_{k=2..d} (-1)^k / k!`, exactly.
pub fn derangement_pair_count(d: usize) -> Result<u128> {
    if d < 2 {
        return Err(Error::invalid(format!("T(d) needs d >= 2, got {d}")));
    }
    let overflow = || Error::Overflow(format!("T({d}) does not fit in 128 bits"));
    // d!/k! for k = d, d-1, ..., 2, built up as a running product.
    let mut total: i128 = 0;
    let mut ratio: u128 = 1;
    for k in (2..=d).rev() {
        let term = i128::try_from(ratio).map_err(|_| overflow())?;
        total = if k % 2 == 0 { total.checked_add(term) } else { total.checked_sub(term) }
            .ok_or_else(overflow)?;
        ratio = ratio.checked_mul(k as u128).ok_or_else(overflow)?;
    }
    u128::try_from(total).map_err(|_| overflow())
}

/// Lexicographic successor; returns false after the last permutation.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All `d!` permutations in lexicographic order.
pub fn all_permutations(d: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (0..d).collect();
    let mut out = vec![Permutation(cur.clone())];
    while next_permutation(&mut cur) {
        out.push(Permutation(cur.clone()));
    }
    out
}
