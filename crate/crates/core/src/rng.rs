//! Seeded random streams.
//!
//! Every sampler draws from a [`SimRng`], which is ChaCha with 8 rounds
//! (`rand_chacha::ChaCha8Rng`) seeded from a single `u64`. Child streams
//! are derived with [`split`], so a replicate's randomness depends only on
//! the master seed and its stream id and never on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `stream` under `master`:
/// `mix(master + GOLDEN * (stream + 1)) ^ mix(stream ^ GOLDEN)`.
pub fn split(master: u64, stream: u64) -> u64 {
    mix(master.wrapping_add(GOLDEN.wrapping_mul(stream.wrapping_add(1)))) ^ mix(stream ^ GOLDEN)
}

pub fn from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shorthand for `from_seed(split(master, stream))`.
pub fn stream(master: u64, stream: u64) -> SimRng {
    from_seed(split(master, stream))
}
