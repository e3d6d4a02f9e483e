//! Seed derivation. Every stochastic component draws from its own ChaCha
//! stream keyed by `(run seed, tag...)`, so results do not depend on the
//! order in which parallel workers are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a path of tags into a new 64-bit seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// A deterministic stream for the given seed and tag path.
pub fn stream(seed: u64, tags: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

/// Tag constants so sub-streams of one run never collide.
pub mod tag {
    pub const NETWORK: u64 = 1;
    pub const GA_INIT: u64 = 10;
    pub const GA_GEN: u64 = 11;
    pub const PSO_INIT: u64 = 20;
    pub const PSO_STEP: u64 = 21;
    pub const FIELD: u64 = 22;
    pub const MISSION_GRP: u64 = 30;
    pub const MISSION_LEG: u64 = 31;
    pub const MISSION_SPAWN: u64 = 32;
    pub const CAMPAIGN: u64 = 40;
}
