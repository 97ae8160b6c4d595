//! Data-parallel helpers. With the `parallel` feature the independent
//! per-item computations fan out over rayon; without it they run
//! sequentially. Output order is the input order either way, so results are
//! bit-identical across thread counts and with the feature disabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Run `f` on a single worker thread even when the parallel feature is
/// enabled. Used by the benchmarks to compare the two execution modes.
pub fn run_sequential<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool");
        pool.install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        f()
    }
}
