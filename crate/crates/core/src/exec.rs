//! Execution strategy for the data-parallel loops (Monte Carlo blocks, ladder sweeps).
//!
//! Every parallel loop in the crate goes through [`Execution::map_indexed`], which
//! returns results in index order. Callers reduce those results sequentially, so
//! the output never depends on the number of workers. Without the `parallel`
//! feature the parallel variant runs sequentially.

use serde::{Deserialize, Serialize};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SKEWDIFF_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Rayon worker pool; `None` uses the global pool.
    Parallel { threads: Option<usize> },
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Parallel { threads: None }
    }
}

impl Execution {
    pub fn with_threads(threads: usize) -> Self {
        Execution::Parallel { threads: Some(threads.max(1)) }
    }

    /// Parallel execution capped by `SKEWDIFF_THREADS` when it holds a positive integer.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0);
        Execution::Parallel { threads }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && matches!(self, Execution::Parallel { .. })
    }

    /// `(0..n).map(f)` collected in index order.
    pub fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match *self {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel { threads } => parallel_map(n, threads, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let run = || (0..n).into_par_iter().map(&f).collect();
    // nested calls stay on the pool they were issued from
    if rayon::current_thread_index().is_some() {
        return run();
    }
    match threads {
        None => run(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(err) => {
                log::warn!("could not build a {k}-thread pool ({err}); using the global pool");
                run()
            }
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, _threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
