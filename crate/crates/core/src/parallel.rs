//! Data-parallel drivers with a sequential fallback.
//!
//! With the `parallel` feature these run on the ambient rayon pool (callers
//! pick the pool size with `ThreadPool::install`). Without it they run as plain
//! loops. Both paths return identical values: searches report the first hit in
//! lexicographic order and reductions must be associative and commutative.

use crate::combinatorics::{binomial, next_combination, unrank};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: u64 = 256;

fn chunk_count(total: u64) -> u64 {
    total.div_ceil(CHUNK)
}

/// Walk the subsets with lexicographic ranks in `[start, end)`.
fn walk_chunk<F>(n: usize, k: usize, start: u64, end: u64, mut visit: F) -> bool
where
    F: FnMut(&[usize]) -> bool,
{
    let mut subset = unrank(n, k, start);
    for _ in start..end {
        if visit(&subset) {
            return true;
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    false
}

fn chunk_bounds(total: u64, chunk: u64) -> (u64, u64) {
    let start = chunk * CHUNK;
    (start, (start + CHUNK).min(total))
}

/// Lexicographically first `k`-subset of `0..n` satisfying `pred`.
pub fn find_first_subset<P>(n: usize, k: usize, pred: P) -> Option<Vec<usize>>
where
    P: Fn(&[usize]) -> bool + Sync,
{
    let total = binomial(n, k);
    let scan = |chunk: u64| {
        let (start, end) = chunk_bounds(total, chunk);
        let mut hit = None;
        walk_chunk(n, k, start, end, |s| {
            if pred(s) {
                hit = Some(s.to_vec());
                true
            } else {
                false
            }
        });
        hit
    };
    #[cfg(feature = "parallel")]
    {
        (0..chunk_count(total)).into_par_iter().find_map_first(scan)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunk_count(total)).find_map(scan)
    }
}

/// Map every `k`-subset to a value and reduce. `combine` must be associative
/// and commutative for the result to be independent of the worker count.
pub fn reduce_subsets<T, M, C>(n: usize, k: usize, map: M, combine: C) -> Option<T>
where
    T: Send,
    M: Fn(u64, &[usize]) -> T + Sync,
    C: Fn(T, T) -> T + Sync + Send,
{
    let total = binomial(n, k);
    let fold_chunk = |chunk: u64| {
        let (start, end) = chunk_bounds(total, chunk);
        let mut acc: Option<T> = None;
        let mut rank = start;
        walk_chunk(n, k, start, end, |s| {
            let v = map(rank, s);
            rank += 1;
            acc = Some(match acc.take() {
                Some(a) => combine(a, v),
                None => v,
            });
            false
        });
        acc
    };
    let merge = |a: Option<T>, b: Option<T>| match (a, b) {
        (Some(a), Some(b)) => Some(combine(a, b)),
        (a, None) => a,
        (None, b) => b,
    };
    #[cfg(feature = "parallel")]
    {
        (0..chunk_count(total))
            .into_par_iter()
            .map(fold_chunk)
            .reduce(|| None, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunk_count(total)).map(fold_chunk).fold(None, merge)
    }
}

/// `(0..count).map(f).collect()`, in index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Run `f` on a pool of `threads` workers (0 = rayon default). A no-op wrapper
/// without the `parallel` feature.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
