//! Portable uniform draws for reproducible test matrices.
//!
//! The generator is SplitMix64: state `x` advances by `0x9E3779B97F4A7C15`
//! and each output is
//!
//! ```text
//! z = x
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out = z ^ (z >> 31)
//! ```
//!
//! with wrapping arithmetic. The seed is the initial state. A uniform draw
//! on `[-1, 1)` takes the top 53 bits: `u = (out >> 11) · 2⁻⁵³`, `x = 2u − 1`.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub struct UniformSource {
    inner: SplitMix64,
}

impl UniformSource {
    pub fn new(seed: u64) -> Self {
        UniformSource { inner: SplitMix64::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }
}
