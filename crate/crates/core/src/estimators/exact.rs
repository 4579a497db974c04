//! Exact Shapley values by enumerating all permutations or all coalitions.

use std::time::Instant;

use super::{run_tasks, Limits, Method, NeumaierSum, ShapleyEstimate};
use crate::designs::next_permutation;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::games::{Coalition, CoalitionGame};

const MASK_CHUNK: usize = 1 << 12;

fn check_players(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("game has no players"));
    }
    Ok(())
}

/// Averages the marginal contributions over all `d!` orderings.
pub fn exact_shapley_permutation<G: CoalitionGame + ?Sized>(game: &G, limits: &Limits) -> Result<ShapleyEstimate> {
    let start = Instant::now();
    let d = game.num_players();
    check_players(d)?;
    if d > limits.perm {
        return Err(Error::LimitExceeded { what: "permutation enumeration", d, limit: limits.perm });
    }
    if d > Limits::default().perm {
        let scans: u64 = (1..=d as u64).product();
        log::warn!("enumerating {d}! = {scans} orderings ({} evaluations)", scans * d as u64);
    }
    // One task per leading player.
    let (totals, calls) = run_tasks(d, d, |first, scanner| {
        let mut rest: Vec<usize> = (0..d).filter(|&p| p != first).collect();
        let mut calls = 0;
        loop {
            calls += scanner.scan(game, std::iter::once(first).chain(rest.iter().copied()))?;
            if !next_permutation(&mut rest) {
                return Ok(calls);
            }
        }
    })?;
    let count = calls / d as u64;
    Ok(ShapleyEstimate {
        values: totals.iter().map(|t| t / count as f64).collect(),
        method: Method::ExactPerm,
        permutations: count,
        evaluations: calls,
        seed: None,
        elapsed: start.elapsed(),
        d_star: None,
    })
}

/// Weighted sum over coalitions: each of the `2^d` values is computed once.
pub fn exact_shapley_subset<G: CoalitionGame + ?Sized>(game: &G, limits: &Limits) -> Result<ShapleyEstimate> {
    let start = Instant::now();
    let d = game.num_players();
    check_players(d)?;
    if d > limits.subset || d > 63 {
        return Err(Error::LimitExceeded { what: "subset enumeration", d, limit: limits.subset.min(63) });
    }
    let n = 1usize << d;
    if d > Limits::default().subset {
        log::warn!("subset oracle at d = {d} caches {n} values (~{} MiB)", (n * 8) >> 20);
    }
    let chunks = n.div_ceil(MASK_CHUNK);
    let mut values = Vec::with_capacity(n);
    for chunk in map_indexed(chunks, |c| {
        (c * MASK_CHUNK..((c + 1) * MASK_CHUNK).min(n))
            .map(|mask| game.value(&Coalition::from_mask(d, mask as u64)))
            .collect::<Result<Vec<f64>>>()
    }) {
        values.extend(chunk?);
    }

    // weight[s] = s! (d-1-s)! / d! = 1 / (d * C(d-1, s))
    let mut weight = Vec::with_capacity(d);
    let mut binom = 1.0f64;
    for s in 0..d {
        weight.push(1.0 / (d as f64 * binom));
        binom = binom * (d - 1 - s) as f64 / (s + 1) as f64;
    }
    let shapley = map_indexed(d, |j| {
        let bit = 1usize << j;
        let mut acc = NeumaierSum::default();
        for mask in (0..n).filter(|m| m & bit == 0) {
            let size = mask.count_ones() as usize;
            acc.add(weight[size] * (values[mask | bit] - values[mask]));
        }
        acc.value()
    });
    Ok(ShapleyEstimate {
        values: shapley,
        method: Method::ExactSubset,
        permutations: n as u64,
        evaluations: n as u64,
        seed: None,
        elapsed: start.elapsed(),
        d_star: None,
    })
}
