//! Replicated accuracy benchmarks: every (method, size, replication) cell runs
//! one estimate with its own derived seed and is scored against a reference.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::metrics::{quantile, squared_loss, topk_error_rate};
use crate::error::{Error, Result};
use crate::estimators::{estimate, estimate_srs, exact_shapley_permutation, exact_shapley_subset, Limits, Method};
use crate::exec::map_indexed;
use crate::games::build_game;
use crate::seed::derive_seed;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where the reference Shapley values come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum TruthSpec {
    /// The game's closed form.
    Oracle,
    ExactSubset,
    ExactPerm,
    /// A long SRS run with at least 100 times the largest benchmarked size.
    PseudoSrs { samples: usize, seed: Option<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub game: String,
    #[serde(default)]
    pub game_params: Value,
    pub methods: Vec<Method>,
    /// Permutation budgets. Design-based methods use
    /// `max(1, size / rows_per_design)` designs.
    pub sizes: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub topk: Vec<usize>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Defaults to the game's closed form.
    #[serde(default)]
    pub truth: Option<TruthSpec>,
    /// Off by default so that reports are byte-for-byte reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub limits: Option<Limits>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&crate::error::read_text(path.as_ref())?)
    }

    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.sizes.is_empty() {
            return Err(Error::invalid("benchmark needs at least one method and one size"));
        }
        if self.sizes.contains(&0) {
            return Err(Error::invalid("benchmark sizes must be positive"));
        }
        if self.replications == 0 {
            return Err(Error::invalid("benchmark needs at least one replication"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchCell {
    pub method: Method,
    pub size: usize,
    /// Permutations actually scanned.
    pub permutations: u64,
    pub replication: usize,
    pub seed: u64,
    pub values: Vec<f64>,
    pub squared_loss: f64,
    /// One rate per configured `k`.
    pub topk_error: Vec<f64>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub size: usize,
    pub permutations: u64,
    pub replications: usize,
    pub mean_loss: f64,
    pub sd_loss: f64,
    pub min_loss: f64,
    pub q25_loss: f64,
    pub median_loss: f64,
    pub q75_loss: f64,
    pub max_loss: f64,
    pub mean_topk_error: Vec<f64>,
    pub mean_wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub config: BenchConfig,
    pub game: String,
    pub d: usize,
    pub truth_source: String,
    pub truth_seed: Option<u64>,
    pub truth: Vec<f64>,
    pub cells: Vec<BenchCell>,
}

/// Design count (or sample count for SRS) that fits a permutation budget.
pub fn budget_to_size(method: Method, budget: usize, d: usize) -> Result<usize> {
    Ok(match method.rows_per_design(d)? {
        Some(rows) => (budget / rows).max(1),
        None => budget,
    })
}

fn method_code(method: Method) -> u64 {
    Method::ALL.iter().position(|&m| m == method).unwrap_or(0) as u64
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let limits = config.limits.unwrap_or_default();
    limits.validate()?;
    let game = build_game(&config.game, &config.game_params)?;
    let d = game.num_players();
    if let Some(&k) = config.topk.iter().find(|&&k| k == 0 || k > d) {
        return Err(Error::invalid(format!("top-k needs 1 <= k <= {d}, got {k}")));
    }

    let (truth, truth_source, truth_seed) = match &config.truth {
        None | Some(TruthSpec::Oracle) => match game.exact_shapley() {
            Some(t) => (t, "oracle".to_string(), None),
            None => {
                return Err(Error::NoTruth(format!(
                    "{} has no closed form; configure truth as exact-subset, exact-perm or pseudo-srs",
                    config.game
                )))
            }
        },
        Some(TruthSpec::ExactSubset) => (exact_shapley_subset(&*game, &limits)?.values, "exact-subset".into(), None),
        Some(TruthSpec::ExactPerm) => (exact_shapley_permutation(&*game, &limits)?.values, "exact-perm".into(), None),
        Some(TruthSpec::PseudoSrs { samples, seed }) => {
            let largest = config.sizes.iter().copied().max().unwrap_or(0);
            if *samples < largest.saturating_mul(100) {
                return Err(Error::NoTruth(format!(
                    "pseudo-truth needs at least 100 x {largest} samples, got {samples}"
                )));
            }
            let seed = seed.unwrap_or_else(|| derive_seed(config.seed, &[u64::MAX]));
            (estimate_srs(&*game, *samples, seed)?.values, "pseudo-srs".into(), Some(seed))
        }
    };

    let mut plan = Vec::new();
    for &method in &config.methods {
        for &size in &config.sizes {
            let units = budget_to_size(method, size, d)?;
            for rep in 0..config.replications {
                let seed = derive_seed(config.seed, &[method_code(method), size as u64, rep as u64]);
                plan.push((method, size, units, rep, seed));
            }
        }
    }
    let cells = map_indexed(plan.len(), |i| -> Result<BenchCell> {
        let (method, size, units, replication, seed) = plan[i];
        let est = estimate(method, &*game, units, seed, &limits)?;
        let topk_error = config.topk.iter().map(|&k| topk_error_rate(&est.values, &truth, k)).collect::<Result<_>>()?;
        Ok(BenchCell {
            method,
            size,
            permutations: est.permutations,
            replication,
            seed,
            squared_loss: squared_loss(&est.values, &truth)?,
            values: est.values,
            topk_error,
            wall_ms: if config.record_wall_time { est.elapsed.as_secs_f64() * 1e3 } else { 0.0 },
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(BenchmarkReport {
        config: config.clone(),
        game: config.game.clone(),
        d,
        truth_source,
        truth_seed,
        truth,
        cells,
    })
}

impl BenchmarkReport {
    /// Cells for one (method, size) pair.
    pub fn cells_for(&self, method: Method, size: usize) -> impl Iterator<Item = &BenchCell> {
        self.cells.iter().filter(move |c| c.method == method && c.size == size)
    }

    pub fn mean_loss(&self, method: Method, size: usize) -> Option<f64> {
        let losses: Vec<f64> = self.cells_for(method, size).map(|c| c.squared_loss).collect();
        (!losses.is_empty()).then(|| losses.iter().sum::<f64>() / losses.len() as f64)
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for &method in &self.config.methods {
            for &size in &self.config.sizes {
                let cells: Vec<&BenchCell> = self.cells_for(method, size).collect();
                let Some(first) = cells.first() else { continue };
                let n = cells.len() as f64;
                let mut losses: Vec<f64> = cells.iter().map(|c| c.squared_loss).collect();
                losses.sort_by(f64::total_cmp);
                let mean = losses.iter().sum::<f64>() / n;
                let sd = if cells.len() > 1 {
                    (losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                rows.push(SummaryRow {
                    method,
                    size,
                    permutations: first.permutations,
                    replications: cells.len(),
                    mean_loss: mean,
                    sd_loss: sd,
                    min_loss: quantile(&losses, 0.0),
                    q25_loss: quantile(&losses, 0.25),
                    median_loss: quantile(&losses, 0.5),
                    q75_loss: quantile(&losses, 0.75),
                    max_loss: quantile(&losses, 1.0),
                    mean_topk_error: (0..self.config.topk.len())
                        .map(|k| cells.iter().map(|c| c.topk_error[k]).sum::<f64>() / n)
                        .collect(),
                    mean_wall_ms: cells.iter().map(|c| c.wall_ms).sum::<f64>() / n,
                });
            }
        }
        rows
    }

    fn manifest(&self) -> Value {
        json!({
            "command": "bench",
            "version": VERSION,
            "config": self.config,
            "truth_source": self.truth_source,
            "truth_seed": self.truth_seed,
        })
    }

    /// One row per cell, preceded by `#` manifest comments.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# shapley-oofa bench version={VERSION}")?;
        write!(out, "# game={} d={} truth={}", self.game, self.d, self.truth_source)?;
        if let Some(seed) = self.truth_seed {
            write!(out, " truth_seed={seed}")?;
        }
        writeln!(out)?;
        writeln!(out, "# manifest={}", self.manifest())?;
        let mut header = vec!["game", "method", "size", "replication", "seed", "squared_loss"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        header.extend(self.config.topk.iter().map(|k| format!("topk_err@{k}")));
        header.push("wall_ms".into());
        writeln!(out, "{}", header.join(","))?;
        for c in &self.cells {
            let mut fields = vec![
                self.game.clone(),
                c.method.as_str().to_string(),
                c.size.to_string(),
                c.replication.to_string(),
                c.seed.to_string(),
                c.squared_loss.to_string(),
            ];
            fields.extend(c.topk_error.iter().map(f64::to_string));
            fields.push(c.wall_ms.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "manifest": self.manifest(),
            "game": self.game,
            "d": self.d,
            "truth": self.truth,
            "topk": self.config.topk,
            "rows": self.summary(),
        })
    }

    /// Writes the CSV to `csv_path` and the summary next to it as
    /// `<stem>.summary.json`. Returns both paths.
    pub fn write_files(&self, csv_path: &Path) -> Result<(PathBuf, PathBuf)> {
        if let Some(dir) = csv_path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut csv = Vec::new();
        self.write_csv(&mut csv)?;
        std::fs::write(csv_path, csv)?;
        let summary_path = csv_path.with_extension("summary.json");
        let mut text = serde_json::to_string_pretty(&self.summary_json())?;
        text.push('\n');
        std::fs::write(&summary_path, text)?;
        Ok((csv_path.to_path_buf(), summary_path))
    }
}
