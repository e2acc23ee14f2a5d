//! Sequential or data-parallel evaluation of independent work items.

/// How independent items (grid points, sweep entries, τ rows) are evaluated.
///
/// Results are always returned in input order, so output does not depend on
/// the choice. Without the `parallel` feature, `Parallel` runs sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => items.iter().map(f).collect(),
        }
    }
}
