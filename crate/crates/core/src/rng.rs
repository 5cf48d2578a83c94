//! Seed derivation.
//!
//! One root seed drives every random draw. Each consumer gets its own ChaCha
//! stream keyed by `(root, stream, index)`, so a tree, an epoch or an
//! explanation draws the same numbers no matter what ran before it or on
//! which worker.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const FOREST_TREE: u64 = 2;
    pub const MLP_INIT: u64 = 3;
    pub const MLP_SHUFFLE: u64 = 4;
    pub const MLP_DROPOUT: u64 = 5;
    pub const MLP_VALIDATION: u64 = 6;
    pub const LIME: u64 = 7;
    pub const KERNEL_SHAP: u64 = 8;
    pub const SCORECARD: u64 = 9;
    pub const BACKGROUND: u64 = 10;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed; distinct `(stream, index)` pairs give unrelated seeds.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index)
}

pub fn rng_for(root: u64, stream: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(root, stream, index))
}
