//! Data-parallel helpers with a sequential fallback.
//!
//! Every batch loop in the crate goes through these two functions, so the
//! `parallel` feature switches the whole crate between rayon and plain
//! iterators. Output order is always the input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Maps `f` over `0..len`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_range<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..len`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Whether this build dispatches batch work to a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
