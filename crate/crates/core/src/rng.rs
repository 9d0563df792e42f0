//! Seeded random streams.
//!
//! Backed by ChaCha8 seeded through `SeedableRng::seed_from_u64`, so a given
//! seed yields the same stream on every platform. Independent substreams are
//! derived with SplitMix64 over `(seed, index)`, which makes per-replica
//! streams independent of scheduling order.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::scalar::Scalar;
use crate::vector::Vector;

/// SplitMix64 finalizer applied to `seed + (index+1)·golden`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator on the `index`-th derived substream; does not advance `self`.
    pub fn split(&self, index: u64) -> Rng {
        Rng::new(derive_seed(self.seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1).
    pub fn uniform01(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on [−1, 1].
    pub fn uniform_pm1(&mut self) -> f64 {
        self.inner.random_range(-1.0..=1.0)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        self.inner.random_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Student-t with `nu` degrees of freedom.
    pub fn student_t(&mut self, nu: f64) -> f64 {
        StudentT::new(nu)
            .expect("degrees of freedom must be positive")
            .sample(&mut self.inner)
    }

    /// ±1 with equal probability.
    pub fn rademacher(&mut self) -> f64 {
        if self.inner.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn gaussian_vec<F: Scalar>(&mut self, dim: usize) -> Vector<F> {
        Vector::from_vec((0..dim).map(|_| F::lit(self.gaussian())).collect())
    }

    pub fn uniform_vec<F: Scalar>(&mut self, dim: usize, lo: f64, hi: f64) -> Vector<F> {
        Vector::from_vec((0..dim).map(|_| F::lit(self.uniform_range(lo, hi))).collect())
    }

    /// Uniform on the unit sphere: a normalized gaussian vector.
    /// Normalization happens in `f64`, so for `F = f64` the norm is 1 to ~1e−16.
    pub fn sphere<F: Scalar>(&mut self, dim: usize) -> Vector<F> {
        loop {
            let g: Vec<f64> = (0..dim).map(|_| self.gaussian()).collect();
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-300 {
                return Vector::from_vec(g.iter().map(|v| F::lit(v / n)).collect());
            }
        }
    }
}
