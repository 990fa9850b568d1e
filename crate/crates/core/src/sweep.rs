//! Order-preserving map over independent jobs (seeds, instances).
//!
//! With the `parallel` feature the work is spread over a rayon pool; without
//! it, or with `jobs == 1`, items run in order on the calling thread. Results
//! come back in input order either way, so output is identical across modes.

/// Runs `f` over `items` on the calling thread.
pub fn map_sequential<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}

/// Runs `f` over `items` on up to `jobs` worker threads (`0` = one per core).
#[cfg(feature = "parallel")]
pub fn map_parallel<I, T, F>(items: &[I], jobs: usize, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if jobs == 1 || items.len() <= 1 {
        return map_sequential(items, f);
    }
    let run = || items.par_iter().map(&f).collect();
    if jobs == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => map_sequential(items, f),
    }
}

/// Sequential stand-in used when the `parallel` feature is off.
#[cfg(not(feature = "parallel"))]
pub fn map_parallel<I, T, F>(items: &[I], _jobs: usize, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    map_sequential(items, f)
}
