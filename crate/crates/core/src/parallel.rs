//! Execution strategy for the data-parallel kernels. With the `parallel`
//! feature enabled (the default) heavy loops run on rayon; without it, or
//! with `Strategy::Sequential`, they run on plain iterators so results can
//! be compared and benchmarked against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(strategy: Strategy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if strategy == Strategy::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = strategy;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let sq = |i: usize| i * i;
        assert_eq!(
            map_indexed(Strategy::Sequential, 100, sq),
            map_indexed(Strategy::Parallel, 100, sq)
        );
    }
}
