//! Execution policy for the data-parallel kernels.
//!
//! With the `parallel` feature (default) the statevector kernels, sweeps and
//! multi-seed loops run on rayon; without it every path is sequential and
//! [`Execution::Parallel`] degrades to [`Execution::Sequential`]. Results are
//! bitwise identical either way: kernels touch disjoint amplitude pairs and
//! reductions use a fixed chunking.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Statevectors shorter than this stay sequential under [`Execution::Auto`].
pub const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Chunk length for deterministic reductions.
pub const REDUCTION_CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    Parallel,
    /// Parallel only for large inputs.
    #[default]
    Auto,
}

impl Execution {
    pub fn is_parallel(self, len: usize) -> bool {
        cfg!(feature = "parallel")
            && match self {
                Execution::Sequential => false,
                Execution::Parallel => true,
                Execution::Auto => len >= PARALLEL_THRESHOLD,
            }
    }
}

/// Maps independent jobs, preserving input order in the output.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
    }
}

/// Runs `f` with at most `workers` threads for nested parallel work. `None`
/// uses the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = workers;
    f()
}

/// Sum of `f(i)` over `0..len`, reduced in fixed chunks so the rounding is
/// independent of thread scheduling.
pub fn chunked_sum(len: usize, exec: Execution, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let chunks = len.div_ceil(REDUCTION_CHUNK);
    let partial = |c: usize| {
        let start = c * REDUCTION_CHUNK;
        (start..(start + REDUCTION_CHUNK).min(len)).map(&f).sum::<f64>()
    };
    let partials: Vec<f64> = {
        #[cfg(feature = "parallel")]
        {
            if exec.is_parallel(len) {
                (0..chunks).into_par_iter().map(partial).collect()
            } else {
                (0..chunks).map(partial).collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = exec;
            (0..chunks).map(partial).collect()
        }
    };
    partials.into_iter().sum()
}
