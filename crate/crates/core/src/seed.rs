//! Counter-based seed splitting.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] keyed by a master
//! seed and positioned on a stream selected by a draw index. Draw `i` of a batch
//! therefore depends only on `(master, i)`, never on the batch size or on which
//! worker happens to run it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream `index` under `master`.
pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |acc, &i| mix64(acc ^ mix64(i)))
}
