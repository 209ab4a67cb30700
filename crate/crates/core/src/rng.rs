//! Seed handling for parallel Monte Carlo.
//!
//! Sample `i` of a run with master seed `s` draws from ChaCha8 keyed by
//! `seed_from_u64(s)` on stream `i`. Streams are disjoint, so the value of
//! every sample is a function of `(s, i)` alone and the thread layout never
//! enters the result. Reductions are done afterwards in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` inside a rayon pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
