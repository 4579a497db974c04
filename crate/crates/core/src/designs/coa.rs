//! Component orthogonal arrays COA(d(d-1), d) for prime-power `d`.
//!
//! The base array stacks `M + a_s` for every field element `a_s`, where `M` is
//! the multiplication table of GF(d) without its all-zero first row. Permuting
//! the last `d - 2` columns of the base array yields `(d-2)!` arrays with
//! pairwise disjoint runs whose union is every permutation of `d` players.

use rand::Rng;

use super::{random_permutation, DesignKind, OofADesign, Permutation, Provenance};
use crate::error::{Error, Result};
use crate::galois::{is_prime_power, FieldSpec};
use crate::seed::stream_rng;

/// Largest `d` for which [`coa_partition_family`] materializes every member.
pub const COA_FAMILY_LIMIT: usize = 7;

pub(crate) fn coa_field(d: usize) -> Result<FieldSpec> {
    if d < 3 {
        return Err(Error::invalid(format!("COA construction needs d >= 3, got {d}")));
    }
    if is_prime_power(d as u64)?.is_none() {
        return Err(Error::NotPrimePower(d as u64));
    }
    FieldSpec::with_order(d as u64)
}

/// Rows of the base array as 0-based players, row-major, `d(d-1)` rows of `d`.
pub(crate) fn coa_base_rows(field: &FieldSpec) -> Vec<usize> {
    let d = field.order() as usize;
    let mut out = Vec::with_capacity(d * (d - 1) * d);
    for shift in 0..d {
        for i in 1..d {
            for j in 0..d {
                out.push(field.add_unchecked(field.mul_unchecked(i, j), shift));
            }
        }
    }
    out
}

/// The base COA(d(d-1), d).
pub fn coa_base(d: usize) -> Result<OofADesign> {
    let identity: Vec<usize> = (0..d).collect();
    build(d, &identity, None)
}

/// The base COA with its last `d - 2` columns permuted uniformly at random.
pub fn coa_random(d: usize, seed: u64) -> Result<OofADesign> {
    coa_field(d)?;
    let columns = random_tail_columns(d, &mut stream_rng(seed, 0));
    build(d, &columns, Some(seed))
}

/// The base COA with output column `c` taken from base column `columns[c]`.
/// The first two entries of `columns` must be 0 and 1.
pub fn coa_with_columns(d: usize, columns: &[usize]) -> Result<OofADesign> {
    let valid = columns.len() == d
        && columns.first() == Some(&0)
        && columns.get(1) == Some(&1)
        && Permutation::from_players(columns.to_vec()).is_ok();
    if !valid {
        return Err(Error::invalid(format!(
            "{columns:?} is not a permutation of the last {} of {d} columns",
            d.saturating_sub(2)
        )));
    }
    build(d, columns, None)
}

pub(crate) fn random_tail_columns<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut columns = vec![0, 1];
    columns.extend(random_permutation(d - 2, rng).into_iter().map(|c| c + 2));
    columns
}

/// Every member of the `(d-2)!` family, columns permuted in lexicographic order.
pub fn coa_partition_family(d: usize) -> Result<Vec<OofADesign>> {
    if d > COA_FAMILY_LIMIT {
        return Err(Error::LimitExceeded { what: "COA partition family", d, limit: COA_FAMILY_LIMIT });
    }
    let field = coa_field(d)?;
    let base = coa_base_rows(&field);
    let mut tail: Vec<usize> = (2..d).collect();
    let mut family = Vec::new();
    loop {
        let mut columns = vec![0, 1];
        columns.extend_from_slice(&tail);
        family.push(assemble(d, &base, &columns, None));
        if !super::next_permutation(&mut tail) {
            break;
        }
    }
    Ok(family)
}

fn build(d: usize, columns: &[usize], seed: Option<u64>) -> Result<OofADesign> {
    let field = coa_field(d)?;
    Ok(assemble(d, &coa_base_rows(&field), columns, seed))
}

fn assemble(d: usize, base: &[usize], columns: &[usize], seed: Option<u64>) -> OofADesign {
    let rows = base
        .chunks_exact(d)
        .map(|row| Permutation::from_players_unchecked(columns.iter().map(|&c| row[c]).collect()))
        .collect();
    let identity = columns.iter().enumerate().all(|(i, &c)| i == c);
    OofADesign::from_parts(
        DesignKind::Coa,
        d,
        rows,
        Some(1),
        Provenance {
            base: "galois-base".into(),
            seed,
            column_permutation: (!identity || seed.is_some()).then(|| columns.to_vec()),
            row_permutation: None,
        },
    )
}
