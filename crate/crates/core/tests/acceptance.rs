//! Acceptance checks, one line of output per criterion.
//!
//! Runs without the libtest harness so every PASS/FAIL line is printed; the
//! process exits non-zero if any criterion fails. Tolerances and time limits
//! are pinned next to each check.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use shapley_oofa::analysis::{run_benchmark, var_coa_exact, var_srs_exact, BenchConfig};
use shapley_oofa::designs::{
    all_permutations, check_coa_balance, coa_base, coa_partition_family, coa_random, derangement_pair_count,
    BalanceReport,
};
use shapley_oofa::estimators::{
    estimate, estimate_coa, estimate_coa_padded, estimate_ls, estimate_srs, exact_shapley_permutation,
    exact_shapley_subset, marginal_contributions, Limits, Method,
};
use shapley_oofa::exec::with_jobs;
use shapley_oofa::games::{
    paired_covariance, AdditiveGame, AirportGame, Coalition, CoalitionGame, ConnectivityGame, Graph, Instrumented,
    LinearGaussianGame, VotingGame,
};
use shapley_oofa::seed::{derive_seed, stream_rng};

/// Collects failed expectations for one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn ensure(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    limit: Duration,
    run: fn(&mut Check),
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn limits() -> Limits {
    Limits::default()
}

/// Shapley values by direct enumeration of all orderings, independent of the
/// library's scan: for each ordering, evaluate every prefix from scratch.
fn brute_force_shapley(d: usize, value: impl Fn(&[usize]) -> f64) -> Vec<f64> {
    let mut sh = vec![0.0; d];
    let mut count = 0.0;
    fn permute(prefix: &mut Vec<usize>, left: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if left.is_empty() {
            visit(prefix);
            return;
        }
        for i in 0..left.len() {
            let p = left.remove(i);
            prefix.push(p);
            permute(prefix, left, visit);
            prefix.pop();
            left.insert(i, p);
        }
    }
    permute(&mut Vec::new(), &mut (0..d).collect(), &mut |order| {
        count += 1.0;
        for k in 0..d {
            sh[order[k]] += value(&order[..=k]) - value(&order[..k]);
        }
    });
    sh.iter().map(|s| s / count).collect()
}

fn airport13() -> AirportGame {
    AirportGame::new(vec![1.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]).unwrap()
}

/// Example-2 style model: one correlated pair plus two independent inputs.
fn gaussian4() -> LinearGaussianGame {
    let sigma = paired_covariance(&[1.0, 0.8, 1.0, 1.0], &[-0.5]).unwrap();
    LinearGaussianGame::new(0.0, vec![1.0, 2.0, 0.5, -1.0], sigma).unwrap()
}

fn random_weights(d: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, d as u64);
    (0..d).map(|_| (rng.random::<f64>() * 10.0).round() / 2.0).collect()
}

fn ac1_coa_balance(c: &mut Check) {
    let balanced = BalanceReport::Balanced { lambda: 1 };
    let mut checked = 0;
    for d in [3, 4, 5, 7, 8, 9, 11, 13] {
        let report = check_coa_balance(&coa_base(d).unwrap()).unwrap();
        c.ensure(report == balanced, || format!("base d={d}: {report}"));
        for seed in 0..20 {
            let design = coa_random(d, seed).unwrap();
            let report = check_coa_balance(&design).unwrap();
            c.ensure(report == balanced, || format!("d={d} seed={seed}: {report}"));
            checked += 1;
        }
    }
    c.note(format!("8 base arrays + {checked} random draws, lambda = 1"));
}

fn ac2_partition_family(c: &mut Check) {
    for d in [4usize, 5] {
        let family = coa_partition_family(d).unwrap();
        let members: usize = (1..=d - 2).product();
        c.ensure(family.len() == members, || format!("d={d}: {} members, expected {members}", family.len()));
        let mut seen = HashSet::new();
        let mut duplicates = 0;
        for design in &family {
            for row in design.rows() {
                if !seen.insert(row.clone()) {
                    duplicates += 1;
                }
            }
        }
        let all: HashSet<_> = all_permutations(d).into_iter().collect();
        c.ensure(duplicates == 0, || format!("d={d}: {duplicates} rows shared between members"));
        c.ensure(seen == all, || format!("d={d}: union has {} of {} permutations", seen.len(), all.len()));
    }
    c.note("(d-2)! members, disjoint, union = S_d for d = 4, 5");
}

fn ac3_dual_oracle(c: &mut Check) {
    let tol = 1e-10;
    let mut worst = 0.0f64;
    let mut games = 0;
    for d in 3..=8usize {
        let mut list: Vec<Box<dyn CoalitionGame>> = vec![
            Box::new(AirportGame::new(random_weights(d, 1)).unwrap()),
            Box::new(ConnectivityGame::new(Graph::path(d))),
            Box::new(ConnectivityGame::new(Graph::cycle(d))),
            Box::new(AdditiveGame::new(random_weights(d, 2).iter().map(|w| w - 2.5).collect())),
        ];
        if d % 2 == 0 {
            list.push(Box::new(VotingGame::new(d).unwrap()));
        }
        for game in &list {
            let perm = exact_shapley_permutation(game, &limits()).unwrap().values;
            let subset = exact_shapley_subset(game, &limits()).unwrap().values;
            let diff = max_abs_diff(&perm, &subset);
            worst = worst.max(diff);
            games += 1;
            c.ensure(diff <= tol, || format!("{} d={d}: max diff {diff:e}", game.name()));
        }
    }
    c.note(format!("{games} games, max |perm - subset| = {worst:.1e} (tol {tol:e})"));
}

fn ac4_closed_forms(c: &mut Check) {
    let tol = 1e-12;
    // Oracle first: brute force with prefix maxima, then the frozen fractions.
    let w = [1.0, 2.0, 3.0];
    let brute = brute_force_shapley(3, |u| u.iter().map(|&i| w[i]).fold(0.0, f64::max));
    let frozen = [1.0 / 3.0, 5.0 / 6.0, 11.0 / 6.0];
    c.ensure(max_abs_diff(&brute, &frozen) <= tol, || format!("brute force {brute:?}"));
    let airport = AirportGame::new(w.to_vec()).unwrap();
    for (label, values) in [
        ("closed form", airport.exact_shapley().unwrap()),
        ("subset", exact_shapley_subset(&airport, &limits()).unwrap().values),
        ("perm", exact_shapley_permutation(&airport, &limits()).unwrap().values),
    ] {
        c.ensure(max_abs_diff(&values, &frozen) <= tol, || format!("airport {label}: {values:?}"));
    }
    for d in [2usize, 4, 6, 8] {
        let game = VotingGame::new(d).unwrap();
        let expect = vec![1.0 / d as f64; d];
        for values in [
            exact_shapley_permutation(&game, &limits()).unwrap().values,
            exact_shapley_subset(&game, &limits()).unwrap().values,
        ] {
            c.ensure(max_abs_diff(&values, &expect) <= tol, || format!("voting d={d}: {values:?}"));
        }
    }
    c.note("airport (1/3, 5/6, 11/6); voting 1/d for d = 2, 4, 6, 8 (tol 1e-12)");
}

fn ac5_zero_variance(c: &mut Check) {
    let tol = 1e-12;
    let reps = 100u64;
    let coeffs = vec![1.5, -2.0, 0.25, 3.0, 0.0, -0.75, 4.0];
    let additive = AdditiveGame::new(coeffs.clone());
    let voting = VotingGame::new(8).unwrap();
    for rep in 0..reps {
        let seed = derive_seed(5, &[rep]);
        for est in [estimate_ls(&additive, 1, seed).unwrap(), estimate_coa(&additive, 1, seed).unwrap()] {
            let diff = max_abs_diff(&est.values, &coeffs);
            c.ensure(diff <= tol, || format!("additive {} rep {rep}: diff {diff:e}", est.method));
        }
        for est in [estimate_ls(&voting, 1, seed).unwrap(), estimate_coa(&voting, 1, seed).unwrap()] {
            let diff = max_abs_diff(&est.values, &[0.125; 8]);
            c.ensure(diff <= tol, || format!("voting {} rep {rep}: diff {diff:e}", est.method));
        }
    }

    let game = gaussian4();
    let runs: Vec<Vec<f64>> =
        (0..reps).map(|rep| estimate_coa(&game, 1, derive_seed(55, &[rep])).unwrap().values).collect();
    let mut worst_sd = 0.0f64;
    for j in 0..4 {
        let mean = runs.iter().map(|r| r[j]).sum::<f64>() / reps as f64;
        let sd = (runs.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        worst_sd = worst_sd.max(sd);
        c.ensure(sd < 1e-10, || format!("linear-Gaussian player {}: sd {sd:e}", j + 1));
    }
    // the two marginal contributions of player 2 and their average
    let v = |labels: &[usize]| game.value(&Coalition::from_labels(4, labels).unwrap()).unwrap();
    let after_1 = v(&[1, 2]) - v(&[1]);
    let alone = v(&[2]);
    let exact = exact_shapley_subset(&game, &limits()).unwrap().values;
    c.ensure((exact[1] - (after_1 + alone) / 2.0).abs() < 1e-12, || format!("Sh_2 = {} vs mean of g", exact[1]));
    c.ensure(max_abs_diff(&runs[0], &exact) < 1e-12, || format!("COA {:?} vs exact {exact:?}", runs[0]));
    c.note(format!(
        "additive and voting exact in {reps}/{reps} reps; Gaussian COA max sd {worst_sd:.1e}, Delta_2 in {{{after_1:.4}, {alone:.4}}}, Sh_2 = {:.5}",
        exact[1]
    ));
}

/// Mean of `reps` replications within 4 standard errors of `exact`.
fn unbiased(c: &mut Check, label: &str, exact: &[f64], reps: u64, run: impl FnMut(u64) -> Vec<f64>) -> f64 {
    let runs: Vec<Vec<f64>> = (0..reps).map(run).collect();
    let n = reps as f64;
    let mut worst = 0.0f64;
    for (j, &truth) in exact.iter().enumerate() {
        let mean = runs.iter().map(|r| r[j]).sum::<f64>() / n;
        let se = (runs.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt();
        let err = (mean - truth).abs();
        // errors at rounding level are exact recoveries, not sampling noise
        let z = if err > 1e-12 { err / se } else { 0.0 };
        worst = worst.max(z);
        c.ensure(err <= (4.0 * se).max(1e-12), || format!("{label} player {}: |mean - exact| = {err:e}, se {se:e}", j + 1));
    }
    worst
}

fn ac6_unbiasedness(c: &mut Check) {
    let reps = 5000;
    let p4 = ConnectivityGame::new(Graph::path(4));
    let airport = AirportGame::new(vec![1.0, 3.0, 2.0, 6.0, 4.5]).unwrap();
    let games: [(&str, &dyn CoalitionGame); 2] = [("P4", &p4), ("airport5", &airport)];
    let mut worst = 0.0f64;
    for (name, game) in games {
        let d = game.num_players();
        let exact = exact_shapley_subset(game, &limits()).unwrap().values;
        let m = d * (d - 1);
        worst = worst.max(unbiased(c, &format!("{name} SRS"), &exact, reps, |r| {
            estimate_srs(game, m, derive_seed(6, &[0, r])).unwrap().values
        }));
        worst = worst.max(unbiased(c, &format!("{name} LS"), &exact, reps, |r| {
            estimate_ls(game, 1, derive_seed(6, &[1, r])).unwrap().values
        }));
        worst = worst.max(unbiased(c, &format!("{name} COA"), &exact, reps, |r| {
            estimate_coa(game, 1, derive_seed(6, &[2, r])).unwrap().values
        }));
    }
    c.note(format!("{reps} reps per method, largest |z| = {worst:.2} (limit 4)"));
}

fn ac7_variance_formulas(c: &mut Check) {
    let tol = 1e-10;
    let games: Vec<(usize, Box<dyn CoalitionGame>)> = vec![
        (4, Box::new(ConnectivityGame::new(Graph::path(4)))),
        (4, Box::new(AirportGame::new(vec![2.0, 1.0, 4.0, 3.5]).unwrap())),
        (5, Box::new(ConnectivityGame::new(Graph::cycle(5)))),
        (5, Box::new(AirportGame::new(vec![1.0, 3.0, 2.0, 6.0, 4.5]).unwrap())),
    ];
    let mut worst = 0.0f64;
    for (d, game) in &games {
        // population variance of the single-design COA estimator over the family
        let rows = (d * (d - 1)) as f64;
        let estimates: Vec<Vec<f64>> = coa_partition_family(*d)
            .unwrap()
            .iter()
            .map(|design| {
                let mut s = vec![0.0; *d];
                for row in design.rows() {
                    for (acc, v) in s.iter_mut().zip(marginal_contributions(game, row).unwrap()) {
                        *acc += v / rows;
                    }
                }
                s
            })
            .collect();
        let n = estimates.len() as f64;
        let empirical: Vec<f64> = (0..*d)
            .map(|j| {
                let mean = estimates.iter().map(|e| e[j]).sum::<f64>() / n;
                estimates.iter().map(|e| (e[j] - mean).powi(2)).sum::<f64>() / n
            })
            .collect();
        let formula = var_coa_exact(game, 1, &limits()).unwrap();
        let diff = max_abs_diff(&formula, &empirical);
        worst = worst.max(diff);
        c.ensure(diff <= tol, || format!("{} d={d}: formula {formula:?} vs family {empirical:?}", game.name()));
    }
    let srs = var_srs_exact(&VotingGame::new(4).unwrap(), 1, &limits()).unwrap();
    c.ensure(max_abs_diff(&srs, &[3.0 / 16.0; 4]) <= 1e-12, || format!("voting Var_SRS {srs:?}"));
    for d in 2..=7 {
        let brute = all_permutations(d)
            .iter()
            .filter(|p| p.players().iter().enumerate().all(|(i, &x)| i != x))
            .count() as u128;
        let t = derangement_pair_count(d).unwrap();
        c.ensure(t == brute, || format!("T({d}) = {t}, brute force {brute}"));
    }
    c.note(format!("Var_COA vs family max diff {worst:.1e}; Var_SRS voting = 3/16; T(2..7) match"));
}

fn ac8_efficiency(c: &mut Check) {
    let tol = 1e-9;
    let mut games: Vec<Box<dyn CoalitionGame>> = vec![
        Box::new(airport13()),
        Box::new(AirportGame::new(random_weights(9, 8)).unwrap()),
        Box::new(VotingGame::new(8).unwrap()),
        Box::new(VotingGame::new(6).unwrap()),
        Box::new(ConnectivityGame::new(Graph::path(6))),
        Box::new(ConnectivityGame::new(Graph::cycle(5))),
        Box::new(ConnectivityGame::new(Graph::cycle(11))),
        Box::new(AdditiveGame::new(random_weights(7, 3))),
        Box::new(gaussian4()),
    ];
    let sigma = paired_covariance(&[1.0, 0.8, 2.0, 1.5, 1.0, 0.5, 1.2], &[-0.5, 0.9, 0.3]).unwrap();
    games.push(Box::new(LinearGaussianGame::new(1.0, vec![1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 1.0], sigma).unwrap()));
    let mut worst = 0.0f64;
    let mut runs = 0;
    for game in &games {
        let d = game.num_players();
        let full = game.value(&Coalition::full(d)).unwrap();
        let mut check = |est: shapley_oofa::estimators::ShapleyEstimate| {
            let rel = (est.total() - full).abs() / full.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            runs += 1;
            c.ensure(rel <= tol, || format!("{} {} seed {:?}: relative error {rel:e}", game.name(), est.method, est.seed));
        };
        if d <= 8 {
            check(exact_shapley_permutation(game, &limits()).unwrap());
        }
        check(exact_shapley_subset(game, &limits()).unwrap());
        for s in 0..50 {
            let seed = derive_seed(8, &[s]);
            check(estimate(Method::Srs, game, 50, seed, &limits()).unwrap());
            check(estimate(Method::Ls, game, 2, seed, &limits()).unwrap());
            check(estimate(Method::CoaPad, game, 1, seed, &limits()).unwrap());
            if let Ok(est) = estimate(Method::Coa, game, 1, seed, &limits()) {
                check(est);
            }
        }
    }
    c.note(format!("{runs} estimates on {} games, worst relative gap {worst:.1e} (tol {tol:e})", games.len()));
}

fn ac9_figure_analogue(c: &mut Check) {
    let config = BenchConfig::from_json(
        r#"{
            "game": "airport",
            "game_params": {"weights": [1, 1, 2, 2, 3, 4, 5, 5, 6, 7, 8, 9, 10]},
            "methods": ["SRS", "LS", "COA"],
            "sizes": [156, 312, 624],
            "replications": 300,
            "seed": 2024
        }"#,
    )
    .unwrap();
    let report = run_benchmark(&config).unwrap();
    let mut lines = Vec::new();
    for &size in &config.sizes {
        let loss = |m| report.mean_loss(m, size).unwrap();
        let (srs, ls, coa) = (loss(Method::Srs), loss(Method::Ls), loss(Method::Coa));
        c.ensure(coa <= ls && ls <= srs, || format!("size {size}: COA {coa:.3e}, LS {ls:.3e}, SRS {srs:.3e}"));
        if size == 156 {
            c.ensure(2.0 * coa <= srs, || format!("size 156: SRS/COA = {:.2} < 2", srs / coa));
        }
        lines.push(format!("{size}: SRS {srs:.2e} LS {ls:.2e} COA {coa:.2e}"));
    }
    c.note(format!("mean squared loss, {}", lines.join("; ")));
}

fn ac10_padding(c: &mut Check) {
    let reps = 3000;
    let game = Instrumented::new(ConnectivityGame::new(Graph::path(6)));
    let exact = exact_shapley_subset(&game, &limits()).unwrap().values;
    game.reset();
    let mut evaluations = 0;
    let mut stars = HashSet::new();
    let worst = unbiased(c, "P6 COA_PAD", &exact, reps, |r| {
        let est = estimate_coa_padded(&game, 1, derive_seed(10, &[r])).unwrap();
        stars.insert(est.d_star);
        evaluations += est.evaluations;
        est.values
    });
    c.ensure(stars == HashSet::from([Some(7)]), || format!("d_star values {stars:?}"));
    c.ensure(!game.saw_foreign_player(), || "a null player reached the value function".into());
    c.ensure(game.largest_coalition() <= 6, || format!("coalition of size {}", game.largest_coalition()));
    c.ensure(game.calls() == evaluations, || format!("{} calls vs {evaluations} reported", game.calls()));
    c.note(format!("d* = 7, {reps} reps, largest |z| = {worst:.2}, {} evaluations, no null player seen", game.calls()));
}

fn ac11_throughput(c: &mut Check) {
    let game = airport13();
    let nc = 10_000usize.div_ceil(156);
    let start = Instant::now();
    let one = with_jobs(1, || estimate_coa(&game, nc, 11).unwrap()).unwrap();
    let single = start.elapsed();
    let eight = with_jobs(8, || estimate_coa(&game, nc, 11).unwrap()).unwrap();
    c.ensure(single < Duration::from_secs(1), || format!("single worker took {single:?}"));
    c.ensure(one.values == eight.values, || "1 and 8 workers disagree".into());
    c.note(format!("m = {} permutations in {:.1} ms on one worker; 8 workers bit-identical", one.permutations, single.as_secs_f64() * 1e3));
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "AC1", title: "COA balance", limit: Duration::from_secs(5), run: ac1_coa_balance },
        Criterion { id: "AC2", title: "partition family", limit: Duration::from_secs(1), run: ac2_partition_family },
        Criterion { id: "AC3", title: "dual oracle", limit: Duration::from_secs(30), run: ac3_dual_oracle },
        Criterion { id: "AC4", title: "closed forms", limit: Duration::from_secs(60), run: ac4_closed_forms },
        Criterion { id: "AC5", title: "zero-variance recovery", limit: Duration::from_secs(60), run: ac5_zero_variance },
        Criterion { id: "AC6", title: "unbiasedness", limit: Duration::from_secs(120), run: ac6_unbiasedness },
        Criterion { id: "AC7", title: "variance formulas", limit: Duration::from_secs(60), run: ac7_variance_formulas },
        Criterion { id: "AC8", title: "efficiency", limit: Duration::from_secs(60), run: ac8_efficiency },
        Criterion { id: "AC9", title: "desk-scale loss ordering", limit: Duration::from_secs(300), run: ac9_figure_analogue },
        Criterion { id: "AC10", title: "null-player padding", limit: Duration::from_secs(120), run: ac10_padding },
        Criterion { id: "AC11", title: "throughput", limit: Duration::from_secs(60), run: ac11_throughput },
    ];
    let mut failed = 0;
    for crit in &criteria {
        let mut check = Check::default();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| (crit.run)(&mut check)));
        let elapsed = start.elapsed();
        if let Err(panic) = outcome {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            check.failures.push(format!("panicked: {msg}"));
        }
        if elapsed > crit.limit {
            check.failures.push(format!("took {elapsed:.2?}, limit {:?}", crit.limit));
        }
        let status = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if check.failures.is_empty() { check.notes.join("; ") } else { check.failures.join("; ") };
        println!("{} {status} {} [{:.2?} / {:?}] {detail}", crit.id, crit.title, elapsed, crit.limit);
        if !check.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
