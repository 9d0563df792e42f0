//! Small dense matrices. Only what the catalog and the statistics need.

use crate::scalar::Scalar;
use crate::vector::Vector;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vector<F>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.dim());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.dim(), cols, "ragged rows");
            data.extend_from_slice(r.as_slice());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn diag(d: &[F]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector<F> {
        Vector::from_vec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn row_dot(&self, i: usize, x: &Vector<F>) -> F {
        self.data[i * self.cols..(i + 1) * self.cols]
            .iter()
            .zip(x.as_slice())
            .fold(F::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn matvec(&self, x: &Vector<F>) -> Vector<F> {
        debug_assert_eq!(x.dim(), self.cols);
        Vector::from_vec((0..self.rows).map(|i| self.row_dot(i, x)).collect())
    }

    /// `Aᵀy`
    pub fn tmatvec(&self, y: &Vector<F>) -> Vector<F> {
        debug_assert_eq!(y.dim(), self.rows);
        let mut out = Vector::zeros(self.cols);
        for i in 0..self.rows {
            let yi = y[i];
            if yi == F::zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += yi * self.get(i, j);
            }
        }
        out
    }

    /// `AᵀA`
    pub fn gram(&self) -> Matrix<F> {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            for a in 0..self.cols {
                let va = self.get(i, a);
                for b in a..self.cols {
                    let v = g.get(a, b) + va * self.get(i, b);
                    g.set(a, b, v);
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                let v = g.get(b, a);
                g.set(a, b, v);
            }
        }
        g
    }

    pub fn is_symmetric(&self, tol: F) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi, computed in `f64`).
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut a: Vec<f64> = self.data.iter().map(|v| v.as_f64()).collect();
        let idx = |i: usize, j: usize| i * n + j;
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[idx(i, j)] * a[idx(i, j)])
                .sum();
            let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
            if off <= 1e-30 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[idx(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[idx(k, p)];
                        let akq = a[idx(k, q)];
                        a[idx(k, p)] = c * akp - s * akq;
                        a[idx(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[idx(p, k)];
                        let aqk = a[idx(q, k)];
                        a[idx(p, k)] = c * apk - s * aqk;
                        a[idx(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }

    /// Extreme singular values `(σ_min, σ_max)` via the Gram matrix.
    pub fn singular_value_range(&self) -> (f64, f64) {
        let ev = self.gram().sym_eigenvalues();
        let lo = ev.first().copied().unwrap_or(0.0).max(0.0).sqrt();
        let hi = ev.last().copied().unwrap_or(0.0).max(0.0).sqrt();
        (lo, hi)
    }
}
