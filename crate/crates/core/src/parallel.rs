//! Data-parallel helpers. With the `parallel` feature (default) these
//! fan out over rayon; without it they fall back to sequential loops
//! with identical results. Reductions used here (max of absolute
//! values) are order-insensitive, so both paths are bit-identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maximum of f over the items.
pub fn max_map<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Element-wise map preserving order.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
