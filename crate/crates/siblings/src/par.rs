//! Sample-level parallelism.
//!
//! Per-point curvature work is pure and independent, so identity checks map
//! over samples and reduce by max. With the `parallel` feature (default)
//! the map runs on rayon; without it, sequentially. Both code paths are
//! exposed so benchmarks can compare them directly.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over items sequentially, stopping at the first error.
pub fn try_map_seq<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, E> + Sync,
    E: Send,
{
    items.iter().map(&f).collect()
}

/// Map `f` over items on the rayon pool.
#[cfg(feature = "parallel")]
pub fn try_map_par<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, E> + Sync,
    E: Send,
{
    items.par_iter().map(&f).collect()
}

/// Feature-selected default: parallel when built with `parallel`,
/// sequential otherwise.
pub fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, E> + Sync,
    E: Send,
{
    #[cfg(feature = "parallel")]
    {
        try_map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        try_map_seq(items, f)
    }
}
