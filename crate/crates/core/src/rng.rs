//! Reproducible per-task random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for task `index` of a run seeded with `seed`.
///
/// Each index selects an independent ChaCha stream, so results do not
/// depend on the order in which tasks are scheduled.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
