//! Deterministic random source.
//!
//! The generator identity is part of the reproducibility contract: a ChaCha
//! stream cipher with 8 rounds, keyed from a 64-bit seed through SplitMix64
//! expansion (`seed_from_u64`). The same seed always yields the same draw
//! sequence for a fixed build. Generators are single-owner; parallel work
//! derives one independent generator per task via [`mix64`] seed mixing or
//! [`Rng::split`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seedable deterministic generator used throughout the crate.
#[derive(Debug, Clone)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Derives an independent child generator, advancing this one by one word.
    pub fn split(&mut self) -> Rng {
        Rng::from_seed(mix64(self.0.next_u64()))
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}

/// SplitMix64 step: adds the golden-ratio increment and applies the
/// xor-shift-multiply finalizer. Bijective on `u64`, so distinct inputs are
/// guaranteed distinct outputs.
pub fn mix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::from_seed(42);
        let mut b = Rng::from_seed(42);
        for _ in 0..64 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_streams_differ_from_parent() {
        let mut parent = Rng::from_seed(7);
        let mut child = parent.split();
        let (p, c) = (parent.next_u64(), child.next_u64());
        assert_ne!(p, c);
    }

    #[test]
    fn mix64_is_injective_on_small_range() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000u64 {
            assert!(seen.insert(mix64(i)));
        }
    }
}
