//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel map here evaluates each item independently with the same
//! floating-point operation order, so results are bit-for-bit identical
//! between [`ExecPolicy::Parallel`] and [`ExecPolicy::Sequential`] and do
//! not depend on the number of worker threads. Without the `parallel`
//! feature both policies run sequentially.

/// How batch operations distribute independent work items.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    /// True when this policy actually fans out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }
}

/// `(0..n).map(f).collect()`, fanned out under the parallel policy.
pub fn map_indexed<T, F>(policy: ExecPolicy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = policy;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, fanned out under the parallel policy.
pub fn map_slice<I, T, F>(policy: ExecPolicy, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = policy;
    items.iter().map(f).collect()
}

/// Fills the columns of a column-major buffer with `f(j, column)`.
pub fn fill_columns<T, F>(policy: ExecPolicy, data: &mut [T], rows: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if rows == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(rows)
            .enumerate()
            .for_each(|(j, col)| f(j, col));
        return;
    }
    let _ = policy;
    for (j, col) in data.chunks_mut(rows).enumerate() {
        f(j, col);
    }
}
