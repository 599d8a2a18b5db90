//! Counter-based random draws.
//!
//! Every stochastic quantity in the laboratory is a pure function of
//! `(seed, sample index, channel)`. Draws are made by seeking a ChaCha8
//! stream to a fixed block per sample, so partitioning the work (chunking,
//! reordering, parallel splits) cannot change any draw. Reproducibility is
//! byte-exact across runs and platforms.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{cast, Real};

/// 32-bit words reserved per sample block. Eight words = four `u64` draws,
/// enough for every per-sample need in the crate.
const WORDS_PER_BLOCK: u128 = 8;

/// Deterministic source of per-sample random values.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Derives an independent sub-stream, e.g. one per experiment arm.
    ///
    /// Uses the SplitMix64 finalizer so nearby ids give unrelated seeds.
    pub fn substream(&self, id: u64) -> Self {
        let mut z = self.seed ^ id.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self { seed: z ^ (z >> 31) }
    }

    /// Raw `u64` draw number `channel` (0..=3) of sample `index`.
    pub fn raw(&self, index: u64, channel: u32) -> u64 {
        debug_assert!((channel as u128) < WORDS_PER_BLOCK / 2);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(index as u128 * WORDS_PER_BLOCK + 2 * channel as u128);
        rng.next_u64()
    }

    /// Uniform draw in `[0, 1)`, 53-bit resolution.
    pub fn uniform<T: Real>(&self, index: u64, channel: u32) -> T {
        // Top 53 bits give the standard dyadic uniform on [0, 1).
        let u = self.raw(index, channel) >> 11;
        cast::<T>(u as f64 * (1.0 / (1u64 << 53) as f64))
    }

    /// Uniform polarization angle in `[0, pi)`.
    pub fn angle<T: Real>(&self, index: u64, channel: u32) -> T {
        self.uniform::<T>(index, channel) * T::PI()
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform_in<T: Real>(&self, index: u64, channel: u32, lo: T, hi: T) -> T {
        lo + self.uniform::<T>(index, channel) * (hi - lo)
    }
}
