//! Data-parallel helpers with a sequential fallback.
//!
//! Results are collected in input order, so callers see identical output
//! whether or not the `parallel` feature is enabled. Budgeted searches never
//! go through here; they stay sequential so that error selection does not
//! depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().with_min_len(256).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Fill `out` by disjoint chunks: `f(start, chunk)` writes the entries for
/// global indices `start .. start + chunk.len()`. Chunks are processed in
/// parallel when enabled; the writes are disjoint, so the result does not
/// depend on scheduling.
pub(crate) fn fill_chunks<T, F>(out: &mut [T], chunk_size: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(chunk_size)
            .enumerate()
            .for_each(|(ci, chunk)| f(ci * chunk_size, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut start = 0;
        for chunk in out.chunks_mut(chunk_size) {
            f(start, chunk);
            start += chunk.len();
        }
    }
}

/// Sequential twin of [`map_range`], kept callable under every feature set
/// so benchmarks can compare the two paths directly.
#[allow(dead_code)]
pub(crate) fn map_range_seq<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Fold `f` over `0..n` searching for the minimum violation key.
///
/// Used by validators: every index is checked, all violations are reduced to
/// the smallest one, so the reported axiom does not depend on scheduling.
pub(crate) fn min_violation<K, F>(n: usize, f: F) -> Option<K>
where
    K: Ord + Send,
    F: Fn(usize) -> Option<K> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter_map(f).min()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).filter_map(f).min()
    }
}
