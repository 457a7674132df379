//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by a
//! master seed. Replica `k` of an experiment uses stream `k` of the master
//! seed, so replicas are independent and can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn master(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Two-level derivation: stream `index` of the sub-seed `(seed, label)`.
///
/// Distinct experiment phases use distinct labels so that adding replicas to
/// one phase never shifts the draws of another.
pub fn substream(seed: u64, label: u64, index: u64) -> SimRng {
    let mixed = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    stream(mixed, index)
}
