//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every stochastic component takes its own `ChaCha8Rng` derived from a master
//! seed and a purpose label, so adding or reordering consumers never perturbs
//! unrelated streams.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed, a purpose label, and an index.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = splitmix64(master);
    for byte in label.bytes() {
        h = splitmix64(h ^ u64::from(byte).wrapping_mul(0xC2B2_AE35_79B9_7F4B));
    }
    splitmix64(h ^ index.wrapping_mul(0x1656_67B1_9E37_79F9))
}

/// Seed a stream for (master, label, index).
pub fn stream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, index))
}
