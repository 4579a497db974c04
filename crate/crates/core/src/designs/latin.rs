//! Latin squares: the cyclic square and its random row/column permutations.

use rand::Rng;

use super::{random_permutation, DesignKind, OofADesign, Permutation, Provenance};
use crate::error::{Error, Result};
use crate::seed::stream_rng;

fn check_order(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!("Latin squares need d >= 2, got {d}")));
    }
    Ok(())
}

/// Row `i` is the identity shifted left `i` times.
pub fn ls_cyclic(d: usize) -> Result<OofADesign> {
    check_order(d)?;
    let rows = (0..d)
        .map(|i| Permutation::from_players_unchecked((0..d).map(|j| (i + j) % d).collect()))
        .collect();
    Ok(OofADesign::from_parts(
        DesignKind::Ls,
        d,
        rows,
        None,
        Provenance { base: "cyclic".into(), ..Provenance::default() },
    ))
}

/// Cyclic square with output row `r` taken from cyclic row `rows[r]` and output
/// column `c` from cyclic column `columns[c]`.
pub fn ls_permuted(d: usize, rows: &[usize], columns: &[usize]) -> Result<OofADesign> {
    check_order(d)?;
    for (what, perm) in [("row", rows), ("column", columns)] {
        if perm.len() != d || Permutation::from_players(perm.to_vec()).is_err() {
            return Err(Error::invalid(format!("{perm:?} is not a {what} permutation of order {d}")));
        }
    }
    Ok(permuted(d, rows.to_vec(), columns.to_vec(), None))
}

/// Cyclic square under a uniformly random row and column permutation.
pub fn ls_random(d: usize, seed: u64) -> Result<OofADesign> {
    check_order(d)?;
    let mut design = ls_random_with(d, &mut stream_rng(seed, 0));
    design.provenance.seed = Some(seed);
    Ok(design)
}

pub(crate) fn ls_random_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> OofADesign {
    let rows = random_permutation(d, rng);
    let columns = random_permutation(d, rng);
    permuted(d, rows, columns, None)
}

/// Row `r`, column `c` of a permuted cyclic square, as a 0-based player.
#[inline]
pub(crate) fn permuted_cell(d: usize, row: usize, column: usize) -> usize {
    (row + column) % d
}

fn permuted(d: usize, rows: Vec<usize>, columns: Vec<usize>, seed: Option<u64>) -> OofADesign {
    let out = rows
        .iter()
        .map(|&r| Permutation::from_players_unchecked(columns.iter().map(|&c| permuted_cell(d, r, c)).collect()))
        .collect();
    OofADesign::from_parts(
        DesignKind::Ls,
        d,
        out,
        None,
        Provenance {
            base: "cyclic".into(),
            seed,
            column_permutation: Some(columns),
            row_permutation: Some(rows),
        },
    )
}

/// True when the design is `d x d` and every column holds each player once.
pub fn check_latin(design: &OofADesign) -> bool {
    let d = design.d();
    if design.len() != d {
        return false;
    }
    (0..d).all(|c| {
        let mut seen = vec![false; d];
        design.rows().iter().all(|row| !std::mem::replace(&mut seen[row.players()[c]], true))
    })
}
