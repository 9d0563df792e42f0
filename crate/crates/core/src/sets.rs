//! Feasible sets with Euclidean projection and linear minimization.

use crate::error::{OptError, Result};
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet<F> {
    FullSpace(usize),
    Box { lo: Vector<F>, hi: Vector<F> },
    Ball { center: Vector<F>, radius: F },
    /// Unit simplex `{x ≥ 0, Σx = 1}`.
    Simplex(usize),
}

impl<F: Scalar> FeasibleSet<F> {
    pub fn full(dim: usize) -> Self {
        FeasibleSet::FullSpace(dim)
    }

    pub fn new_box(lo: Vector<F>, hi: Vector<F>) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(OptError::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo.dim() == 0 {
            return Err(OptError::InvalidSet("box of dimension 0".into()));
        }
        for i in 0..lo.dim() {
            if !(lo[i] <= hi[i]) || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(OptError::InvalidSet(format!(
                    "box bounds at {i}: lo={} hi={}",
                    lo[i], hi[i]
                )));
            }
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// `[lo, hi]^dim`
    pub fn cube(dim: usize, lo: F, hi: F) -> Result<Self> {
        Self::new_box(Vector::filled(dim, lo), Vector::filled(dim, hi))
    }

    pub fn ball(center: Vector<F>, radius: F) -> Result<Self> {
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(OptError::InvalidSet(format!("ball radius {radius}")));
        }
        if center.dim() == 0 {
            return Err(OptError::InvalidSet("ball of dimension 0".into()));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(OptError::InvalidSet("simplex of dimension 0".into()));
        }
        Ok(FeasibleSet::Simplex(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::FullSpace(d) | FeasibleSet::Simplex(d) => *d,
            FeasibleSet::Box { lo, .. } => lo.dim(),
            FeasibleSet::Ball { center, .. } => center.dim(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, FeasibleSet::FullSpace(_))
    }

    /// `sup ||x − y||` over the set.
    pub fn diameter(&self) -> Option<F> {
        match self {
            FeasibleSet::FullSpace(_) => None,
            FeasibleSet::Box { lo, hi } => Some(hi.dist(lo)),
            FeasibleSet::Ball { radius, .. } => Some(*radius + *radius),
            FeasibleSet::Simplex(d) => Some(if *d == 1 {
                F::zero()
            } else {
                F::lit(2.0).sqrt()
            }),
        }
    }

    pub fn project(&self, y: &Vector<F>) -> Result<Vector<F>> {
        y.check_dim(self.dim())?;
        Ok(match self {
            FeasibleSet::FullSpace(_) => y.clone(),
            FeasibleSet::Box { lo, hi } => {
                let mut x = y.clone();
                for i in 0..x.dim() {
                    x[i] = x[i].max(lo[i]).min(hi[i]);
                }
                x
            }
            FeasibleSet::Ball { center, radius } => {
                let r = y.dist(center);
                if r <= *radius {
                    y.clone()
                } else {
                    let d = y - center;
                    center.plus_scaled(*radius / r, &d)
                }
            }
            FeasibleSet::Simplex(_) => project_simplex(y),
        })
    }

    /// A minimizer of `⟨g, y⟩` over the set. Ties resolve to the lowest index;
    /// `g = 0` yields `lo` (box), `e₁` (simplex) or the center (ball).
    pub fn lmo(&self, g: &Vector<F>) -> Result<Vector<F>> {
        g.check_dim(self.dim())?;
        match self {
            FeasibleSet::FullSpace(_) => Err(OptError::UnboundedSet("lmo over full space")),
            FeasibleSet::Box { lo, hi } => {
                let mut y = lo.clone();
                for i in 0..y.dim() {
                    if g[i] < F::zero() {
                        y[i] = hi[i];
                    }
                }
                Ok(y)
            }
            FeasibleSet::Ball { center, radius } => {
                let n = g.norm();
                if n == F::zero() {
                    Ok(center.clone())
                } else {
                    Ok(center.plus_scaled(-*radius / n, g))
                }
            }
            FeasibleSet::Simplex(d) => {
                let mut best = 0;
                for i in 1..*d {
                    if g[i] < g[best] {
                        best = i;
                    }
                }
                Ok(Vector::basis(*d, best))
            }
        }
    }

    /// Distance from `x` to the set.
    pub fn residual(&self, x: &Vector<F>) -> Result<F> {
        Ok(self.project(x)?.dist(x))
    }

    pub fn contains(&self, x: &Vector<F>, tol: F) -> bool {
        match self.residual(x) {
            Ok(r) => r <= tol,
            Err(_) => false,
        }
    }
}

/// Sort-and-threshold projection onto the unit simplex.
fn project_simplex<F: Scalar>(y: &Vector<F>) -> Vector<F> {
    let mut u: Vec<F> = y.as_slice().to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = F::zero();
    let mut theta = F::zero();
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - F::one()) / F::from_usize_lossy(j + 1);
        if uj - t > F::zero() {
            theta = t;
        }
    }
    y.map(|v| (v - theta).max(F::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x)
    }

    #[test]
    fn box_projection_clamps() {
        let s = FeasibleSet::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(s.project(&v(&[2.0, -1.0])).unwrap(), v(&[1.0, 0.0]));
    }

    #[test]
    fn ball_projection_scales() {
        let s = FeasibleSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let p = s.project(&v(&[3.0, 4.0])).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn simplex_projection_example() {
        let s = FeasibleSet::<f64>::simplex(3).unwrap();
        let p = s.project(&v(&[0.5, 0.5, 1.0])).unwrap();
        let want = [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0];
        for i in 0..3 {
            assert!((p[i] - want[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn lmo_examples() {
        let sx = FeasibleSet::<f64>::simplex(3).unwrap();
        assert_eq!(sx.lmo(&v(&[3.0, 1.0, 2.0])).unwrap(), v(&[0.0, 1.0, 0.0]));
        let bx = FeasibleSet::cube(2, -1.0, 1.0).unwrap();
        assert_eq!(bx.lmo(&v(&[0.5, -2.0])).unwrap(), v(&[-1.0, 1.0]));
        let bl = FeasibleSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let y = bl.lmo(&v(&[3.0, 4.0])).unwrap();
        assert!((y[0] + 0.6).abs() < 1e-15 && (y[1] + 0.8).abs() < 1e-15);
    }

    #[test]
    fn lmo_canonical_points_for_zero_gradient() {
        let z = v(&[0.0, 0.0]);
        let bx = FeasibleSet::cube(2, -1.0, 2.0).unwrap();
        assert_eq!(bx.lmo(&z).unwrap(), v(&[-1.0, -1.0]));
        let sx = FeasibleSet::<f64>::simplex(2).unwrap();
        assert_eq!(sx.lmo(&z).unwrap(), v(&[1.0, 0.0]));
        let bl = FeasibleSet::ball(v(&[0.5, 0.5]), 1.0).unwrap();
        assert_eq!(bl.lmo(&z).unwrap(), v(&[0.5, 0.5]));
    }

    #[test]
    fn errors() {
        let f = FeasibleSet::<f64>::full(2);
        assert!(matches!(f.lmo(&v(&[1.0, 0.0])), Err(OptError::UnboundedSet(_))));
        assert!(matches!(
            f.project(&v(&[1.0])),
            Err(OptError::DimensionMismatch { .. })
        ));
        assert!(FeasibleSet::new_box(v(&[1.0]), v(&[0.0])).is_err());
        assert!(FeasibleSet::ball(v(&[0.0]), 0.0).is_err());
    }
}
