//! Seeded random streams.
//!
//! Every random draw in the crate goes through [`stream`], which keys a
//! ChaCha8 generator by `(base seed, purpose)` and selects an independent
//! stream per run or seed index. Adding runs never perturbs earlier ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags so different quantities of one run never share a stream.
pub mod purpose {
    pub const SOLUTION: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const FUNCTIONAL: u64 = 3;
    pub const SIGNS: u64 = 4;
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for `(base, index, purpose)`.
pub fn stream(base: u64, index: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(base ^ mix(purpose)));
    rng.set_stream(index);
    rng
}
