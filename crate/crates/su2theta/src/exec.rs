//! Indexed map running in parallel when the `parallel` feature is on.
//!
//! Sweeps over couplings, optimizer candidates, and noise trajectories are
//! embarrassingly parallel over an index range; everything funnels through
//! `collect_indexed` so the feature flag switches one place only.

/// Maps `f` over `0..n` sequentially.
pub fn seq_collect<R>(n: usize, f: impl Fn(usize) -> R) -> Vec<R> {
    (0..n).map(f).collect()
}

/// Maps `f` over `0..n` on the rayon thread pool.
#[cfg(feature = "parallel")]
pub fn par_collect<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, parallel when built with the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn collect_indexed<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    par_collect(n, f)
}

/// Maps `f` over `0..n`, parallel when built with the `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub fn collect_indexed<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    seq_collect(n, f)
}
