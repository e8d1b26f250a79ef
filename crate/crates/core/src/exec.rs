//! Execution strategy for the data-parallel loops of the crate.
//!
//! Every parallel routine has a sequential twin; both must produce identical
//! output, which the test-suite and the benchmarks check.

/// How a batch loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Sequential,
    /// Rayon work-stealing. Falls back to [`Strategy::Sequential`] when the
    /// crate is built without the `parallel` feature.
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

impl Strategy {
    /// Whether this strategy actually runs on multiple threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }

    /// Ordered `filter_map` over `0..len`.
    pub fn filter_map_range<T, F>(self, len: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Strategy::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().filter_map(f).collect();
        }
        (0..len).filter_map(f).collect()
    }

    /// Ordered `map` over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Strategy::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let f = |x: u64| x.is_multiple_of(3).then_some(x * x);
        let a = Strategy::Sequential.filter_map_range(1000, f);
        let b = Strategy::Parallel.filter_map_range(1000, f);
        assert_eq!(a, b);
        let xs: Vec<u32> = (0..500).collect();
        assert_eq!(
            Strategy::Sequential.map_slice(&xs, |x| x + 1),
            Strategy::Parallel.map_slice(&xs, |x| x + 1)
        );
    }
}
