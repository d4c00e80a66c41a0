//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they are plain sequential iterators. Every caller produces the
//! same output either way: results are collected in input order and no
//! computation depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Maps each item to a partial accumulator and merges them with `reduce`.
/// `reduce` must be associative and commutative with `identity` as unit.
#[cfg(feature = "parallel")]
pub fn fold_reduce<T, A, ID, FO, RE>(items: &[T], identity: ID, fold: FO, reduce: RE) -> A
where
    T: Sync,
    A: Send,
    ID: Fn() -> A + Sync + Send,
    FO: Fn(A, &T) -> A + Sync + Send,
    RE: Fn(A, A) -> A + Sync + Send,
{
    items
        .par_iter()
        .fold(&identity, fold)
        .reduce(&identity, reduce)
}

#[cfg(not(feature = "parallel"))]
pub fn fold_reduce<T, A, ID, FO, RE>(items: &[T], identity: ID, fold: FO, _reduce: RE) -> A
where
    T: Sync,
    A: Send,
    ID: Fn() -> A + Sync + Send,
    FO: Fn(A, &T) -> A + Sync + Send,
    RE: Fn(A, A) -> A + Sync + Send,
{
    items.iter().fold(identity(), fold)
}

/// Bounds the worker count of the global pool. Only the first call wins;
/// a no-op in sequential builds.
pub fn set_workers(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
