//! Seeded random streams.
//!
//! A run has one master seed. Work item `i` (an example's position in its
//! input file) draws from ChaCha stream `i` of that seed, so results do not
//! depend on scheduling or on how many workers run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
