//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature (the default) indexed work is spread over the
//! rayon pool; without it, or inside [`sequential`], it runs on the calling
//! thread. Work is always split into the same fixed tasks and results are
//! returned in task order, so callers that reduce in that order get bit-identical
//! output for any worker count.

use std::cell::Cell;

use crate::error::{Error, Result};

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with parallel execution disabled on this thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    struct Restore(bool);
    impl Drop for Restore {
        fn drop(&mut self) {
            FORCE_SEQUENTIAL.with(|s| s.set(self.0));
        }
    }
    let _restore = Restore(FORCE_SEQUENTIAL.with(|s| s.replace(true)));
    f()
}

/// True when [`map_indexed`] would fan out to a worker pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|s| s.get())
}

/// Runs `f` on a dedicated pool of `jobs` workers.
///
/// Without the `parallel` feature this just calls `f`.
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if jobs == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if jobs == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    Ok(f())
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}
