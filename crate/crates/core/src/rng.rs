//! Seed derivation and per-stream generators.
//!
//! Every simulated object owns a private ChaCha8 stream. Replication `r` of a study
//! seeded with `master` draws from `derive_seed(master, r, tag)`, so results never
//! depend on which worker ran which replication.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for the simulated chain of a replication.
pub const TAG_PATH: u64 = 0x5041_5448;
/// Stream tag for the auxiliary Gaussian noise of the robust mean estimator.
pub const TAG_ROBUST: u64 = 0x524f_4253;
/// Stream tag for grid cells of an LRT sweep.
pub const TAG_GRID: u64 = 0x4752_4944;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a stream seed from a master seed, a stream index and a tag.
pub fn derive_seed(master: u64, index: u64, tag: u64) -> u64 {
    let mut h = mix64(master.wrapping_add(GOLDEN_GAMMA));
    h = mix64(h ^ index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1));
    mix64(h ^ tag.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Generator for a single stream.
pub fn stream_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
