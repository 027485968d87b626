//! Thin dispatch layer between the rayon-backed and sequential builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cap the global worker pool (0 = automatic). No-op without the
/// `parallel` feature; a no-op after the pool has started.
pub fn configure_workers(n: u64) {
    #[cfg(feature = "parallel")]
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

/// Sum `f(i)` over `0..n` with `T: Send + Sum`.
pub(crate) fn sum_indexed<T, F>(n: u64, f: F) -> T
where
    T: Send + std::iter::Sum<T>,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).sum()
    }
}

/// First index in `0..n` (lowest) where `f` returns `Some`, or None.
pub(crate) fn find_first_indexed<T, F>(n: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(f)
    }
}

/// Map `f` over `0..n`, preserving index order.
pub(crate) fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
