//! Fork-join helpers. With the `parallel` feature the recursive operators
//! split independent branches through `rayon::join`; without it, or when a
//! context is configured for one worker, everything runs on the caller.

/// Parallel execution settings carried by a decision-diagram store.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parallelism {
    workers: usize,
    /// recursion depth up to which branches are forked
    fork_depth: u32,
}

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism::sequential()
    }
}

impl Parallelism {
    pub const DEFAULT_FORK_DEPTH: u32 = 12;

    pub fn sequential() -> Self {
        Parallelism {
            workers: 1,
            fork_depth: 0,
        }
    }

    /// `workers` threads; falls back to sequential when the crate is built
    /// without the `parallel` feature.
    pub fn with_workers(workers: usize) -> Self {
        let workers = workers.max(1);
        if workers == 1 || !cfg!(feature = "parallel") {
            return Parallelism::sequential();
        }
        Parallelism {
            workers,
            fork_depth: Self::DEFAULT_FORK_DEPTH,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    #[inline]
    pub(crate) fn forks_at(&self, depth: u32) -> bool {
        depth < self.fork_depth
    }

    /// Runs `f` inside a pool of `workers` threads (or inline when sequential).
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if self.workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .expect("failed to start worker pool");
            return pool.install(f);
        }
        f()
    }
}

#[inline]
pub(crate) fn join<A, B, RA, RB>(fork: bool, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if fork {
        return rayon::join(a, b);
    }
    let _ = fork;
    (a(), b())
}
