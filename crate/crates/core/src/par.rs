//! Scenario-level data parallelism. Runs fan out one job per worker with no
//! shared mutable state; results come back in input order so reductions stay
//! deterministic. The sequential fallback is always compiled and is what the
//! public API uses when the `parallel` feature is off.

/// Map a batch of independent jobs, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_jobs<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Map a batch of independent jobs, preserving input order.
#[cfg(not(feature = "parallel"))]
pub fn map_jobs<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Sequential reference path, available regardless of features so callers
/// (and benches) can compare against [`map_jobs`].
pub fn map_jobs_sequential<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Cap the global worker pool; honored once per process. Returns false when
/// the pool was already initialized (or the build is sequential).
#[cfg(feature = "parallel")]
pub fn limit_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn limit_threads(_n: usize) -> bool {
    false
}
