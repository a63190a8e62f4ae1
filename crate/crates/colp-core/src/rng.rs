//! Deterministic random-number streams.
//!
//! All randomized work derives from a master seed through a counter-based
//! generator (ChaCha with 8 rounds) with one independent stream per
//! replication, so replications can run in parallel and still reproduce
//! bit-identically. Run records carry [`RNG_ALGORITHM`] so outputs are
//! attributable to the generator family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identity of the generator family, recorded in outputs.
pub const RNG_ALGORITHM: &str = "chacha8";

/// splitmix64 finalizer; decorrelates consecutive indices.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream identifier for replication `index` under `seed`.
pub fn stream_id(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index))
}

/// Generator for one replication: keyed by the seed, positioned on the
/// replication's own stream.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(seed, index));
    rng
}
