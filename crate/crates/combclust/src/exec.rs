//! Execution mode for the data-parallel kernels.
//!
//! Kernels that fan out over independent work items (matrix rows, candidate
//! partitions, betweenness sources) take an [`Exec`] and produce results in
//! index order either way, so parallel and sequential runs are bit-identical.
//! Without the `parallel` feature, [`Exec::Parallel`] quietly runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this build can actually run work in parallel.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Evaluate `f` for every index in `0..n`, returning results in index order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Evaluate `f` over a slice, results in slice order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_on_order() {
        let a = Exec::Sequential.map_range(100, |i| i * i);
        let b = Exec::Parallel.map_range(100, |i| i * i);
        assert_eq!(a, b);
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(
            Exec::Sequential.map_slice(&xs, |x| x + 1),
            Exec::Parallel.map_slice(&xs, |x| x + 1)
        );
    }
}
