//! Reproducible random streams.
//!
//! Splitting rule: a run is identified by a single `u64` seed. Work item `k`
//! (a Monte Carlo chunk, a quadrature node, a validation point) draws from
//! ChaCha8 seeded with that seed and switched to stream `k`. Results are
//! therefore independent of how work items are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when neither a flag nor `WEYLREDUCE_SEED` provides one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
