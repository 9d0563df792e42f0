//! Dense vectors in R^d.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{OptError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector<F> {
    data: Vec<F>,
}

impl<F: Scalar> Vector<F> {
    pub fn from_vec(data: Vec<F>) -> Self {
        Self { data }
    }

    pub fn from_f64(data: &[f64]) -> Self {
        Self {
            data: data.iter().map(|&v| F::lit(v)).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![F::zero(); dim],
        }
    }

    pub fn filled(dim: usize, value: F) -> Self {
        Self {
            data: vec![value; dim],
        }
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = F::one();
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<F> {
        self.data
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.as_f64()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, F> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> F {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(F::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> F {
        self.dot(self)
    }

    pub fn norm(&self) -> F {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Self) -> F {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Self) -> F {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(F::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: F, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (s, &o) in self.data.iter_mut().zip(&other.data) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: F) {
        for s in &mut self.data {
            *s *= a;
        }
    }

    pub fn scaled(&self, a: F) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self + a * other` without mutating either argument.
    pub fn plus_scaled(&self, a: F, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(a, other);
        out
    }

    pub fn map(&self, f: impl Fn(F) -> F) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> F {
        self.data.iter().copied().sum()
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(OptError::DimensionMismatch {
                expected,
                got: self.dim(),
            })
        }
    }
}

impl<F> Index<usize> for Vector<F> {
    type Output = F;
    fn index(&self, i: usize) -> &F {
        &self.data[i]
    }
}

impl<F> IndexMut<usize> for Vector<F> {
    fn index_mut(&mut self, i: usize) -> &mut F {
        &mut self.data[i]
    }
}

impl<F: Scalar> From<Vec<F>> for Vector<F> {
    fn from(data: Vec<F>) -> Self {
        Self { data }
    }
}

impl<F: Scalar> Add for &Vector<F> {
    type Output = Vector<F>;
    fn add(self, rhs: Self) -> Vector<F> {
        self.plus_scaled(F::one(), rhs)
    }
}

impl<F: Scalar> Sub for &Vector<F> {
    type Output = Vector<F>;
    fn sub(self, rhs: Self) -> Vector<F> {
        self.plus_scaled(-F::one(), rhs)
    }
}

impl<F: Scalar> Mul<F> for &Vector<F> {
    type Output = Vector<F>;
    fn mul(self, rhs: F) -> Vector<F> {
        self.scaled(rhs)
    }
}

impl<F: Scalar> Neg for &Vector<F> {
    type Output = Vector<F>;
    fn neg(self) -> Vector<F> {
        self.scaled(-F::one())
    }
}

/// Incremental arithmetic mean of a stream of vectors.
#[derive(Clone, Debug)]
pub struct RunningMean<F> {
    mean: Vector<F>,
    count: usize,
}

impl<F: Scalar> RunningMean<F> {
    pub fn new(dim: usize) -> Self {
        Self {
            mean: Vector::zeros(dim),
            count: 0,
        }
    }

    pub fn push(&mut self, x: &Vector<F>) {
        self.count += 1;
        let w = F::one() / F::from_usize_lossy(self.count);
        for (m, &v) in self.mean.as_mut_slice().iter_mut().zip(x.as_slice()) {
            *m += w * (v - *m);
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> &Vector<F> {
        &self.mean
    }

    pub fn into_mean(self) -> Vector<F> {
        self.mean
    }
}
