//! Worker pool for independent restarts.

use rayon::prelude::*;
use zekit_core::codesearch::{merge, run_restart, FeasibilityReport, SearchOptions};
use zekit_core::opsys::OperatorSystem;

use crate::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ZEKIT_THREADS";

pub struct WorkerPool {
    pool: rayon::ThreadPool,
}

impl WorkerPool {
    /// Pool sized by `ZEKIT_THREADS` when set, otherwise by rayon's default.
    pub fn from_env() -> Result<Self> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={v:?} is not a positive integer")))?,
            ),
            Err(_) => None,
        };
        Self::with_threads(threads)
    }

    pub fn with_threads(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Error::Pool(e.to_string()))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Multi-start search for a `d`-vector code, restarts spread over the pool.
    /// The merge is the core one, so the report does not depend on the thread count.
    pub fn search(&self, l: &OperatorSystem, d: usize, restarts: usize, seed: u64, tol: f64) -> Result<FeasibilityReport> {
        if restarts == 0 {
            return Err(Error::Config(String::from("at least one restart is required")));
        }
        let opts = SearchOptions::with_tol(tol);
        let outcomes = self.pool.install(|| {
            (0..restarts)
                .into_par_iter()
                .map(|r| run_restart(l, d, seed, r, &opts))
                .collect::<zekit_core::Result<Vec<_>>>()
        })?;
        Ok(merge(outcomes, seed, tol)?)
    }

    /// Runs `f` inside the pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}
