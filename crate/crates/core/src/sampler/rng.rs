//! Explicitly seeded generator with independent streams.
//!
//! Algorithm, so other implementations can reproduce a stream exactly:
//!
//! 1. state = xoshiro256++ seeded from the 64-bit seed through SplitMix64
//!    (four consecutive SplitMix64 outputs fill the 256-bit state);
//! 2. stream `k` applies the xoshiro256 `jump()` polynomial `k` times
//!    (each jump advances 2^128 steps, so streams never overlap);
//! 3. uniforms are `(next_u64 >> 11) · 2^-53` in `[0, 1)`;
//! 4. normals come in Box-Muller pairs from two uniforms `u1, u2`:
//!    `r = sqrt(-2 ln(1 - u1))`, returning `r cos(2π u2)` then `r sin(2π u2)`.

use std::f64::consts::TAU;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: Xoshiro256PlusPlus,
    spare_normal: Option<f64>,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = Xoshiro256PlusPlus::seed_from_u64(seed);
        for _ in 0..stream {
            inner.jump();
        }
        Self {
            seed,
            stream,
            inner,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare_normal = Some(r * s);
        r * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RngState::new(42, 3);
        let mut b = RngState::new(42, 3);
        for _ in 0..1000 {
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = RngState::new(42, 0);
        let mut b = RngState::new(42, 1);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn uniform_in_range() {
        let mut r = RngState::new(7, 0);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
