//! Seeded random streams.
//!
//! Every stochastic routine takes a generator handle. Independent workers
//! derive their own stream from the master seed so results do not depend on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the workspace.
pub type QRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> QRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of the generator family keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> QRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}
