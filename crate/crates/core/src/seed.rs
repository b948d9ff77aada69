//! Seed derivation.
//!
//! Every random stream in the crate is obtained from a master seed, a stream
//! label and an index:
//!
//! ```text
//! sub_seed(master, label, i) = mix(mix(master ^ fnv1a64(label)) ^ i)
//! ```
//!
//! where `fnv1a64` is the 64-bit FNV-1a hash of the label's UTF-8 bytes and
//! `mix` is the SplitMix64 finaliser. Each sub-seed initialises a
//! [`ChaCha8Rng`], so trial `i` sees the same numbers whichever thread runs it
//! and in whatever order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    mix64(mix64(master ^ fnv1a64(label.as_bytes())) ^ index)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, label: &str, index: u64) -> Rng {
    rng_from_seed(derive_seed(master, label, index))
}
