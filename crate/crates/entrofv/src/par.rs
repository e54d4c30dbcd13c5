//! Thin indirection over rayon so the whole crate can be built with a
//! purely sequential core (`--no-default-features`). Results are collected
//! in index order in both modes, so reductions performed afterwards are
//! deterministic regardless of thread count.

/// Map `f` over `0..n`, in parallel when the `parallel` feature is enabled.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sum `f(i)` over `0..n` with a deterministic (sequential, index-ordered)
/// final reduction; the per-item evaluations may run in parallel.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    // Chunked evaluation keeps memory bounded while preserving order.
    const CHUNK: usize = 1 << 14;
    let mut total = 0.0;
    let mut start = 0;
    while start < n {
        let len = CHUNK.min(n - start);
        let vals = map_indexed(len, |i| f(start + i));
        total += vals.iter().sum::<f64>();
        start += len;
    }
    total
}
