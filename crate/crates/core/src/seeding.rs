//! Deterministic seed derivation for ensemble trials.
//!
//! Trial seeds are produced by folding the master seed, a hash of the
//! experiment tag and the trial's indices through the SplitMix64 finaliser:
//!
//! ```text
//! h = mix(master ^ GOLDEN)
//! h = mix(h ^ fnv1a64(tag))
//! for each index x: h = mix(h ^ x)
//! ```
//!
//! Seeds depend only on these inputs, so an ensemble can be extended or
//! executed in any order without changing the trials already run.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(tag: &str) -> u64 {
    tag.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn derive_seed(master: u64, tag: &str, indices: &[u64]) -> u64 {
    let mut h = mix64(master ^ GOLDEN);
    h = mix64(h ^ fnv1a64(tag));
    for &x in indices {
        h = mix64(h ^ x);
    }
    h
}
