//! Deterministic counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, index)`: the ChaCha key comes
//! from the seed, the ChaCha stream id from `stream`, and the word position
//! from `index`. A given address always yields the same value, regardless of
//! evaluation order or thread.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;

/// SplitMix64 finaliser, used to derive child seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from a parent seed and a list of labels.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(mix64(seed), |acc, &label| mix64(acc ^ mix64(label.wrapping_add(0x632B_E59B_D9B4_E019))))
}

#[derive(Clone)]
pub struct GaussianStream {
    rng: ChaCha12Rng,
}

impl GaussianStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Standard complex Gaussian (`E|z|^2 = 1`) at position `index`.
    /// Box-Muller over exactly two 64-bit words per index.
    pub fn complex_normal(&mut self, index: u64) -> Complex64 {
        self.rng.set_word_pos(u128::from(index) * 4);
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((a >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let radius = (-u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        Complex64::new(radius * angle.cos(), radius * angle.sin())
    }

    /// Uniform in `[0, 1)` at position `index`.
    pub fn uniform(&mut self, index: u64) -> f64 {
        self.rng.set_word_pos(u128::from(index) * 4);
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
