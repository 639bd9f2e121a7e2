//! Data-parallel map used for per-point work within a refinement level.
//!
//! With the `parallel` feature the map runs on rayon's pool; without it the
//! same closure runs sequentially. Output order is identical either way.

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "GEOSUBDIV_THREADS";

#[cfg(feature = "parallel")]
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Configures the global pool from `GEOSUBDIV_THREADS` if set. Returns the
/// thread count applied, if any. Safe to call more than once.
pub fn init_from_env() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok()?;
    if n == 0 {
        return None;
    }
    set_threads(n);
    Some(n)
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) {
    // Fails only when the global pool already exists; keep the existing one.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_n: usize) {}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
