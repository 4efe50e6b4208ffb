//! Ray-level parallelism for the workspace sweep.

use rayon::prelude::*;
use vertebra_core::workspace::{RayRunner, SerialRunner};

/// Runs rays on a dedicated rayon pool; `threads == 1` evaluates them in
/// order on the calling thread.
pub struct Runner {
    pool: Option<rayon::ThreadPool>,
}

impl Runner {
    /// `None` uses every available core.
    pub fn new(threads: Option<usize>) -> Runner {
        if threads == Some(1) {
            return Runner { pool: None };
        }
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        Runner { pool: b.build().ok() }
    }

    pub fn serial() -> Runner {
        Runner { pool: None }
    }
}

impl RayRunner for Runner {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            None => SerialRunner.run(n, f),
            Some(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        }
    }
}
