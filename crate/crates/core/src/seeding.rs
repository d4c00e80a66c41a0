//! Stable, platform-independent seed derivation.
//!
//! Every random decision in the pipeline is a pure function of the run seed
//! and a key (a document id, a stage tag, a replicate index), so results do
//! not depend on input order or thread scheduling.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn hash_bytes(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

pub fn keyed(seed: u64, key: &str) -> u64 {
    mix64(mix64(seed) ^ hash_bytes(key.as_bytes()))
}

/// Seed for a named sub-stage, e.g. `derive(seed, &["bootstrap", "spike", "all", "1905"])`.
pub fn derive(seed: u64, path: &[&str]) -> u64 {
    path.iter().fold(seed, |s, part| keyed(s, part))
}

/// Uniform draw in `[0, 1)` keyed by `(seed, key)`.
pub fn unit_interval(seed: u64, key: &str) -> f64 {
    (keyed(seed, key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
