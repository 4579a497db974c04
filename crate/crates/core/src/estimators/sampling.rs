//! Sampling estimators: simple random permutations and the Latin-square and
//! component-orthogonal-array designs.
//!
//! Design `c` of a run with master seed `s` is drawn from stream `c` of `s`,
//! and SRS permutation `i` from stream `i`, so estimates do not depend on how
//! the work is split across workers.

use std::time::Instant;

use super::{padded_order, run_tasks, Method, ShapleyEstimate};
use crate::designs::coa::{coa_base_rows, coa_field, random_tail_columns};
use crate::designs::latin::permuted_cell;
use crate::designs::{random_permutation, srs_permutation};
use crate::error::{Error, Result};
use crate::games::CoalitionGame;
use crate::seed::stream_rng;

/// Permutations per SRS task.
const SRS_CHUNK: usize = 64;

fn finish(
    method: Method,
    totals: Vec<f64>,
    permutations: usize,
    evaluations: u64,
    seed: u64,
    start: Instant,
    d_star: Option<usize>,
) -> ShapleyEstimate {
    ShapleyEstimate {
        values: totals.iter().map(|t| t / permutations as f64).collect(),
        method,
        permutations: permutations as u64,
        evaluations,
        seed: Some(seed),
        elapsed: start.elapsed(),
        d_star,
    }
}

fn positive(what: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(format!("{what} must be at least 1")));
    }
    Ok(())
}

/// Averages marginal contributions over `m` uniform random permutations.
pub fn estimate_srs<G: CoalitionGame + ?Sized>(game: &G, m: usize, seed: u64) -> Result<ShapleyEstimate> {
    let start = Instant::now();
    let d = game.num_players();
    positive("sample count", m)?;
    positive("player count", d)?;
    let (totals, calls) = run_tasks(d, m.div_ceil(SRS_CHUNK), |t, scanner| {
        let mut calls = 0;
        for i in t * SRS_CHUNK..((t + 1) * SRS_CHUNK).min(m) {
            let perm = srs_permutation(d, seed, i as u64);
            calls += scanner.scan(game, perm.players().iter().copied())?;
        }
        Ok(calls)
    })?;
    Ok(finish(Method::Srs, totals, m, calls, seed, start, None))
}

/// Averages over the rows of `nc` independent random Latin squares.
pub fn estimate_ls<G: CoalitionGame + ?Sized>(game: &G, nc: usize, seed: u64) -> Result<ShapleyEstimate> {
    let start = Instant::now();
    let d = game.num_players();
    positive("design count", nc)?;
    if d < 2 {
        return Err(Error::invalid(format!("Latin-square sampling needs d >= 2, got {d}")));
    }
    let (totals, calls) = run_tasks(d, nc, |c, scanner| {
        let mut rng = stream_rng(seed, c as u64);
        let rows = random_permutation(d, &mut rng);
        let columns = random_permutation(d, &mut rng);
        let mut calls = 0;
        for &r in &rows {
            calls += scanner.scan(game, columns.iter().map(|&col| permuted_cell(d, r, col)))?;
        }
        Ok(calls)
    })?;
    Ok(finish(Method::Ls, totals, d * nc, calls, seed, start, None))
}

/// Averages over the rows of `nc` independent random COA(d(d-1), d) designs.
/// `d` must be a prime power of at least 3.
pub fn estimate_coa<G: CoalitionGame + ?Sized>(game: &G, nc: usize, seed: u64) -> Result<ShapleyEstimate> {
    let start = Instant::now();
    let d = game.num_players();
    positive("design count", nc)?;
    let (totals, calls, rows) = coa_scan(game, d, nc, seed)?;
    Ok(finish(Method::Coa, totals, rows, calls, seed, start, None))
}

/// COA estimate for any `d >= 2`: designs are built on `d*` players (the next
/// prime power) and the padded null players are dropped from every row before
/// scanning, so they cost no evaluations. The divisor counts all `d*(d*-1)` rows.
pub fn estimate_coa_padded<G: CoalitionGame + ?Sized>(game: &G, nc: usize, seed: u64) -> Result<ShapleyEstimate> {
    let start = Instant::now();
    let d = game.num_players();
    positive("design count", nc)?;
    let star = padded_order(d)?;
    let (totals, calls, rows) = coa_scan(game, star, nc, seed)?;
    Ok(finish(Method::CoaPad, totals, rows, calls, seed, start, Some(star)))
}

/// Scans `nc` random COAs on `order` players, keeping only players below
/// `game.num_players()`. Returns totals, evaluations and rows scanned.
fn coa_scan<G: CoalitionGame + ?Sized>(game: &G, order: usize, nc: usize, seed: u64) -> Result<(Vec<f64>, u64, usize)> {
    let d = game.num_players();
    let field = coa_field(order)?;
    let base = coa_base_rows(&field);
    let (totals, calls) = run_tasks(d, nc, |c, scanner| {
        let columns = random_tail_columns(order, &mut stream_rng(seed, c as u64));
        let mut calls = 0;
        for row in base.chunks_exact(order) {
            calls += scanner.scan(game, columns.iter().map(|&col| row[col]).filter(|&p| p < d))?;
        }
        Ok(calls)
    })?;
    Ok((totals, calls, order * (order - 1) * nc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{coa_random, ls_random};
    use crate::estimators::{exact_shapley_permutation, marginal_contributions, Limits};
    use crate::exec::with_jobs;
    use crate::games::{AdditiveGame, AirportGame, ConnectivityGame, Graph, Instrumented, VotingGame};

    #[test]
    fn first_design_matches_the_seeded_constructors() {
        // design 0 of a run is the design the public constructor builds
        let game = AirportGame::new(vec![1.0, 4.0, 2.0, 2.5, 3.0]).unwrap();
        let design = coa_random(5, 9).unwrap();
        let mut expect = vec![0.0; 5];
        for row in design.rows() {
            for (e, v) in expect.iter_mut().zip(marginal_contributions(&game, row).unwrap()) {
                *e += v / 20.0;
            }
        }
        let est = estimate_coa(&game, 1, 9).unwrap();
        assert!(est.values.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-12));

        let design = ls_random(5, 9).unwrap();
        let mut expect = vec![0.0; 5];
        for row in design.rows() {
            for (e, v) in expect.iter_mut().zip(marginal_contributions(&game, row).unwrap()) {
                *e += v / 5.0;
            }
        }
        let est = estimate_ls(&game, 1, 9).unwrap();
        assert!(est.values.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn d3_coa_is_exact() {
        let game = ConnectivityGame::new(Graph::path(3));
        let exact = exact_shapley_permutation(&game, &Limits::default()).unwrap();
        for seed in 0..5 {
            let est = estimate_coa(&game, 1, seed).unwrap();
            assert_eq!(est.values, exact.values);
        }
    }

    #[test]
    fn accounting() {
        let game = AdditiveGame::new(vec![1.0; 6]);
        let srs = estimate_srs(&game, 100, 1).unwrap();
        assert_eq!((srs.permutations, srs.evaluations), (100, 600));
        let ls = estimate_ls(&game, 3, 1).unwrap();
        assert_eq!((ls.permutations, ls.evaluations), (18, 108));
        let pad = estimate_coa_padded(&game, 2, 1).unwrap();
        assert_eq!(pad.d_star, Some(7));
        assert_eq!((pad.permutations, pad.evaluations), (84, 84 * 6));
        let game = AdditiveGame::new(vec![1.0; 5]);
        let coa = estimate_coa(&game, 2, 1).unwrap();
        assert_eq!((coa.permutations, coa.evaluations), (40, 200));
    }

    #[test]
    fn padding_is_a_no_op_for_prime_powers() {
        let game = AirportGame::new(vec![3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0]).unwrap();
        let a = estimate_coa(&game, 3, 21).unwrap();
        let b = estimate_coa_padded(&game, 3, 21).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(b.d_star, Some(7));
    }

    #[test]
    fn null_players_are_never_evaluated() {
        let game = Instrumented::new(ConnectivityGame::new(Graph::path(6)));
        let est = estimate_coa_padded(&game, 4, 5).unwrap();
        assert_eq!(game.calls(), est.evaluations);
        assert!(!game.saw_foreign_player());
        assert!(game.largest_coalition() <= 6);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let game = AirportGame::new((1..=13).map(f64::from).collect()).unwrap();
        for method in [Method::Srs, Method::Ls, Method::Coa, Method::CoaPad] {
            let size = if method == Method::Srs { 1000 } else { 7 };
            let run = || super::super::estimate(method, &game, size, 99, &Limits::default()).unwrap().values;
            let one = with_jobs(1, run).unwrap();
            let many = with_jobs(8, run).unwrap();
            let seq = crate::exec::sequential(run);
            assert_eq!(one, many, "{method}");
            assert_eq!(one, seq, "{method}");
        }
    }

    #[test]
    fn preconditions() {
        let game = VotingGame::new(6).unwrap();
        assert!(estimate_srs(&game, 0, 0).is_err());
        assert!(estimate_ls(&game, 0, 0).is_err());
        assert!(matches!(estimate_coa(&game, 1, 0), Err(Error::NotPrimePower(6))));
        assert!(estimate_coa_padded(&AdditiveGame::new(vec![1.0]), 1, 0).is_err());
        assert!(estimate_ls(&AdditiveGame::new(vec![1.0]), 1, 0).is_err());
    }
}
