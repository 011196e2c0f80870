//! Seed derivation. Every random decision in the crate draws from a
//! [`ChaCha8Rng`] whose seed is a stable mix of a master seed and a stream
//! index, so results never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags keep sub-seeds of unrelated consumers apart.
pub(crate) mod stream {
    pub const LEARN_STEP: u64 = 0x6c65_6172_6e00_0001;
    pub const RANDOM_ENSEMBLE: u64 = 0x7261_6e64_0000_0002;
    pub const FOREST_TREE: u64 = 0x7472_6565_0000_0003;
    pub const PSEUDO_TEST: u64 = 0x7073_6575_646f_0004;
    pub const SYNTH: u64 = 0x7379_6e74_6800_0005;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable mix of `(seed, stream, index)` into a 64-bit sub-seed.
pub fn sub_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index)
}

pub fn rng_for(seed: u64, stream: u64, index: u64) -> Rng {
    Rng::seed_from_u64(sub_seed(seed, stream, index))
}
