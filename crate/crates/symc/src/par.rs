//! Data-parallel fan-out with a sequential fallback.
//!
//! Batch work in this crate (sampling sweeps, certificate grids, table
//! runners) is expressed through [`par_map`].  With the default `parallel`
//! feature the closure is distributed over the rayon worker pool; without it
//! the same call sites run sequentially, which keeps the crate usable on
//! targets where threads are unwelcome and gives benchmarks a baseline to
//! compare against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled, otherwise
/// sequentially.  Results come back in input order either way.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Sequential reference implementation of [`par_map`].
///
/// Exists so benchmarks can compare the fan-out against a plain loop inside a
/// single compiled configuration.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// True when this build distributes [`par_map`] over a thread pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_preserves_order() {
        let out = par_map((0..100).collect::<Vec<_>>(), |i| i * i);
        let expected: Vec<_> = (0..100).map(|i| i * i).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn seq_map_matches_par_map() {
        let a = par_map((0..40).collect::<Vec<_>>(), |i| i + 7);
        let b = seq_map((0..40).collect::<Vec<_>>(), |i| i + 7);
        assert_eq!(a, b);
    }
}
