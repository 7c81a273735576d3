//! Deterministic seed derivation.
//!
//! Every source of randomness in the pipeline is a ChaCha8 stream seeded
//! from the root seed through [`derive_seed`], so a single `--seed` value
//! pins the whole run, independent of platform or thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche for cheap seed mixing.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a root seed, a stage tag, and a counter.
///
/// The same (root, tag, counter) triple always yields the same child seed.
pub fn derive_seed(root: u64, tag: &str, counter: u64) -> u64 {
    let mut h = splitmix64(root);
    for &b in tag.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ counter)
}

/// A ChaCha8 stream for the given (root, tag, counter) triple.
pub fn stream(root: u64, tag: &str, counter: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, tag, counter))
}
