//! Reproducible random streams.
//!
//! A stream is identified by `(seed, stream_id)`. The generator is ChaCha8 with
//! the stream id mapped onto ChaCha's native 64-bit stream counter, so every
//! trial index gets its own independent keystream and results never depend on
//! how trials are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform sign in `{-1, +1}`.
    #[inline]
    pub fn sign(&mut self) -> i8 {
        if self.inner.next_u32() & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.inner.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniformly random `k`-subset of `0..n` as a bitmask (partial Fisher-Yates).
    pub fn subset_mask(&mut self, n: usize, k: usize) -> u64 {
        assert!(k <= n && n <= 64);
        let mut pool: Vec<usize> = (0..n).collect();
        let mut mask = 0u64;
        for slot in 0..k {
            let j = slot + self.below((n - slot) as u64) as usize;
            pool.swap(slot, j);
            mask |= 1 << pool[slot];
        }
        mask
    }
}
