//! Thin dispatch layer between the rayon-backed data-parallel kernels and the
//! sequential fallback. Every parallel site in this crate is either a
//! max-reduction or writes disjoint outputs, so parallel and sequential runs
//! produce bitwise-identical results.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn par_map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map_indexed<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Fold `0..n` into per-chunk accumulators and combine them.
///
/// `combine` must be associative and commutative (all callers use max-merges),
/// so the reduction order cannot change the result.
#[cfg(feature = "parallel")]
pub fn par_fold<A: Send>(
    n: usize,
    init: impl Fn() -> A + Sync + Send,
    fold: impl Fn(A, usize) -> A + Sync + Send,
    combine: impl Fn(A, A) -> A + Sync + Send,
) -> A {
    (0..n)
        .into_par_iter()
        .fold(&init, |acc, i| fold(acc, i))
        .reduce(&init, combine)
}

#[cfg(not(feature = "parallel"))]
pub fn par_fold<A>(
    n: usize,
    init: impl Fn() -> A,
    fold: impl Fn(A, usize) -> A,
    combine: impl Fn(A, A) -> A,
) -> A {
    let _ = combine;
    (0..n).fold(init(), fold)
}

/// Honor a thread-count override from the environment. Call once at startup;
/// later calls are no-ops if the pool already exists.
#[cfg(feature = "parallel")]
pub fn init_threads_from_env(var: &str) {
    if let Ok(s) = std::env::var(var) {
        if let Ok(n) = s.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn init_threads_from_env(_var: &str) {}
