//! Exact variance formulas, accuracy metrics and the benchmark harness.

pub mod bench;
mod metrics;
mod variance;

pub use bench::{budget_to_size, run_benchmark, BenchCell, BenchConfig, BenchmarkReport, SummaryRow, TruthSpec};
pub use metrics::{quantile, squared_loss, top_k, topk_error_rate};
pub use variance::{
    cov_coa_exact, cov_ls_exact, var_coa_exact, var_ls_exact, var_srs_exact, variance_report, VarianceReport,
    PAIR_LIMIT,
};
