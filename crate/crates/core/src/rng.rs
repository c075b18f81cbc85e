//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit seed or RNG. Sub-streams are
//! derived from a master seed with a SplitMix64 counter scheme: the seed for
//! the path `(master, a, b, ...)` is obtained by folding each tag into the
//! state and finalizing with the SplitMix64 mixer. The derivation depends only
//! on the tags, so serial and parallel runs draw identical streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags used across the crate. Keeping them in one place stops two
/// callers from accidentally sharing a stream.
pub mod tags {
    pub const SYNTH_COVARIATES: u64 = 1;
    pub const SYNTH_TIMES: u64 = 2;
    pub const CV_FOLDS: u64 = 3;
    pub const TRAIN_DATA: u64 = 4;
    pub const TEST_DATA: u64 = 5;
    pub const XI_CALIBRATION: u64 = 6;
    pub const SAMPLER: u64 = 7;
    pub const REPLICATION: u64 = 8;
    pub const DIRECTIONS: u64 = 9;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `master` and a path of tags.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |state, &tag| splitmix64(state ^ splitmix64(tag)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive_rng(master: u64, path: &[u64]) -> Rng {
    rng_from_seed(derive_seed(master, path))
}
