//! Batch execution of independent work items.
//!
//! Sweeps and verification suites evaluate many independent cases; with
//! the `parallel` feature those map over a rayon pool, otherwise over a
//! plain iterator. Output order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_batch<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

/// Sequential fallback with the same signature and ordering.
#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
