//! Seeded random streams.
//!
//! Every stochastic operation in the crate takes an explicit `u64` seed and
//! builds its own [`StdRng`] from it. Independent sub-streams (graph, signal,
//! detection matrix, noise, per-trial) are derived from a parent seed with
//! [`derive_seed`], a SplitMix64-style mixer, so that parallel work never
//! shares a stream and every result is reproducible from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type StdRng = ChaCha8Rng;

/// Stream tags used when splitting a trial seed.
pub mod stream {
    pub const GRAPH: u64 = 0x6772_6170_6800;
    pub const SIGNAL: u64 = 0x7369_676e_616c;
    pub const DETECTION: u64 = 0x6465_7465_6374;
    pub const NOISE: u64 = 0x6e6f_6973_6500;
    pub const TRIAL: u64 = 0x7472_6961_6c00;
    pub const GRID: u64 = 0x6772_6964_0000;
}

pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `index` of `parent`.
///
/// `derive_seed(p, i) == derive_seed(p, j)` only if `i == j` (up to 64-bit
/// collisions), and the mapping is a pure function of its inputs.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}
