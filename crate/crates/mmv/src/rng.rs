//! Deterministic seed derivation and RNG construction.
//!
//! Every random draw in the crate goes through a ChaCha stream whose seed is
//! derived with SplitMix64 from a caller-supplied base seed plus structural
//! coordinates (row index, column index, trial index, ...). Streams are
//! therefore independent of evaluation order and thread schedule, and results
//! are bit-identical across runs and platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer. Bijective on u64, good avalanche.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapse a sequence of coordinates into a single 64-bit stream seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut state = 0x243f_6a88_85a3_08d3; // pi fractional bits, arbitrary fixed
    for &part in parts {
        state = splitmix64(state ^ part);
    }
    state
}

/// Deterministic generator for a derived seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derive_seed_is_order_sensitive() {
        assert_ne!(derive_seed(&[1, 2]), derive_seed(&[2, 1]));
        assert_ne!(derive_seed(&[1]), derive_seed(&[1, 0]));
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = seeded_rng(derive_seed(&[7, 3]));
        let mut b = seeded_rng(derive_seed(&[7, 3]));
        for _ in 0..16 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn splitmix_known_value() {
        // Reference value from the SplitMix64 paper test vector chain.
        assert_eq!(splitmix64(0), 0xe220a8397b1dcdaf);
    }
}
