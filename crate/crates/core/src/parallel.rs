//! Deterministic batch parallelism.
//!
//! Work is cut into fixed-size batches independent of the worker count; batch
//! `k` always draws from stream `k` of the master seed and results are
//! gathered in batch order.

use rayon::prelude::*;

use crate::rng::SimRng;

/// Items handled per random stream.
pub const BATCH_SIZE: usize = 256;

/// Master seed and worker count for a parallel run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunPlan {
    pub seed: u64,
    pub workers: usize,
}

impl RunPlan {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self {
            seed,
            workers: workers.max(1),
        }
    }

    pub fn sequential(seed: u64) -> Self {
        Self::new(seed, 1)
    }

    /// Runs `task(rng, batch_index, batch_len)` over `ceil(n / BATCH_SIZE)`
    /// batches and returns the per-batch results in batch order.
    pub fn map_batches<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut SimRng, usize, usize) -> T + Sync,
    {
        let batches = n.div_ceil(BATCH_SIZE);
        let run = |k: usize| {
            let len = BATCH_SIZE.min(n - k * BATCH_SIZE);
            let mut rng = SimRng::new(self.seed, k as u64);
            task(&mut rng, k, len)
        };
        if self.workers == 1 {
            return (0..batches).map(run).collect();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
        {
            Ok(pool) => pool.install(|| (0..batches).into_par_iter().map(run).collect()),
            Err(_) => (0..batches).map(run).collect(),
        }
    }

    /// Draws `n` items with `draw` and concatenates them in batch order.
    pub fn collect<T, E, F>(&self, n: usize, draw: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(&mut SimRng) -> Result<T, E> + Sync,
    {
        let batches = self.map_batches(n, |rng, _, len| {
            (0..len).map(|_| draw(rng)).collect::<Result<Vec<T>, E>>()
        });
        let mut out = Vec::with_capacity(n);
        for b in batches {
            out.extend(b?);
        }
        Ok(out)
    }
}
