//! Seeded random streams.
//!
//! Every random draw in the harness comes from a [`SimRng`] seeded by
//! [`derive_seed`], so a replication's stream depends only on the master seed
//! and its coordinates, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a master seed with a path of stream coordinates.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn substream(master: u64, path: &[u64]) -> SimRng {
    rng_from_seed(derive_seed(master, path))
}

/// Stream tags used by the experiment harness.
pub mod tag {
    pub const PARAMS: u64 = 0x5041_5241;
    pub const DATA: u64 = 0x4441_5441;
    pub const MU: u64 = 0x4d55_4f52;
    pub const BOOT: u64 = 0x424f_4f54;
}
