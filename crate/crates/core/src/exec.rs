//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or under [`Execution::Sequential`], the same closures run on
//! the calling thread. Every helper returns results in index order, so
//! downstream reductions are identical for any thread count.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runtime choice between the parallel and sequential paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// `f(i)` for every `i` in `range`, collected in index order.
    pub fn map<T, F>(self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => range.into_par_iter().map(f).collect(),
            _ => range.map(f).collect(),
        }
    }

    /// Number of indices in `range` for which `f` holds.
    pub fn count<F>(self, range: Range<u64>, f: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => range.into_par_iter().filter(|&i| f(i)).count() as u64,
            _ => range.filter(|&i| f(i)).count() as u64,
        }
    }

    /// Folds contiguous chunks of `range` independently, then merges the
    /// chunk results left to right. `merge` must be associative; chunking is
    /// fixed by `chunks`, not by the thread count.
    pub fn fold_chunks<A, I, F, M>(self, range: Range<u64>, chunks: u64, init: I, fold: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, Range<u64>) -> A + Sync + Send,
        M: Fn(A, A) -> A,
    {
        let len = range.end.saturating_sub(range.start);
        let chunks = chunks.clamp(1, len.max(1));
        let step = len.div_ceil(chunks);
        let parts = self.map(0..chunks, |c| {
            let lo = range.start + c * step;
            let hi = (lo + step).min(range.end);
            fold(init(), lo.min(hi)..hi)
        });
        parts.into_iter().reduce(merge).unwrap_or_else(init)
    }
}

/// Runs `f` with the worker count capped at `threads` (parallel builds only).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool");
        return pool.install(f);
    }
    let _ = threads;
    f()
}
