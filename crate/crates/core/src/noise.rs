//! Noise models realized as oracle decorators.

use crate::error::{OptError, Result};
use crate::oracle::OracleSuite;
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub enum AbsMode<F> {
    /// The same perturbation `v` on every call.
    Fixed(Vector<F>),
    /// `Δ·e` with `e` uniform on the unit sphere, fresh per call.
    RandomDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RelMode {
    /// `(1−α)∇f`
    #[default]
    Shrink,
    /// `(1+α)∇f`
    Grow,
    /// `∇f + α||∇f||·e`, `e` uniform on the sphere.
    RandomDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StochDist {
    /// `σ·z`, `z` standard gaussian per component.
    #[default]
    Gaussian,
    /// Student-t with 3 degrees of freedom scaled to per-component variance `σ²`.
    StudentT3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ZoBoundedMode {
    /// `δ(x) = Δ·s(x)` with `s(x) = +1` when `Σᵢ(xᵢ − x*ᵢ) ≥ 0`, else `−1`
    /// (`x* = 0` when unknown). Deterministic and discontinuous across a hyperplane
    /// through `x*`, which biases two-point differences straddling it.
    #[default]
    DeterministicWorst,
    /// Uniform on `[−Δ, Δ]`, fresh per call.
    Random,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum NoiseSpec<F> {
    #[default]
    None,
    AbsoluteGrad { delta: F, mode: AbsMode<F> },
    RelativeGrad { alpha: F, mode: RelMode },
    AdditiveStochGrad { sigma: F, dist: StochDist },
    ZoBoundedValue { delta: F, mode: ZoBoundedMode },
    /// Rademacher `±Δ̃`, so `E ξ² = Δ̃²` exactly.
    ZoStochValue { delta_tilde: F },
}

impl<F: Scalar> NoiseSpec<F> {
    pub fn is_none(&self) -> bool {
        matches!(self, NoiseSpec::None)
    }

    pub fn perturbs_gradient(&self) -> bool {
        matches!(
            self,
            NoiseSpec::AbsoluteGrad { .. }
                | NoiseSpec::RelativeGrad { .. }
                | NoiseSpec::AdditiveStochGrad { .. }
        )
    }

    pub fn perturbs_value(&self) -> bool {
        matches!(
            self,
            NoiseSpec::ZoBoundedValue { .. } | NoiseSpec::ZoStochValue { .. }
        )
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let nonneg = |name: &str, v: F| -> Result<()> {
            if v >= F::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(OptError::IncompatibleNoise(format!("{name} must be ≥ 0, got {v}")))
            }
        };
        match self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::AbsoluteGrad { delta, mode } => {
                nonneg("delta", *delta)?;
                if let AbsMode::Fixed(v) = mode {
                    if v.dim() != dim {
                        return Err(OptError::DimensionMismatch {
                            expected: dim,
                            got: v.dim(),
                        });
                    }
                    if v.norm() > *delta * (F::one() + F::epsilon()) {
                        return Err(OptError::IncompatibleNoise(format!(
                            "fixed vector norm {} exceeds delta {}",
                            v.norm(),
                            delta
                        )));
                    }
                }
                Ok(())
            }
            NoiseSpec::RelativeGrad { alpha, .. } => {
                nonneg("alpha", *alpha)?;
                if *alpha >= F::one() {
                    return Err(OptError::IncompatibleNoise(format!(
                        "alpha must be < 1, got {alpha}"
                    )));
                }
                Ok(())
            }
            NoiseSpec::AdditiveStochGrad { sigma, .. } => nonneg("sigma", *sigma),
            NoiseSpec::ZoBoundedValue { delta, .. } => nonneg("delta", *delta),
            NoiseSpec::ZoStochValue { delta_tilde } => nonneg("delta_tilde", *delta_tilde),
        }
    }
}

/// Decorate `oracle` with `noise` drawn from `rng`.
///
/// Gradient noise needs a gradient oracle. Replaces any previous noise model.
pub fn wrap_noise<F: Scalar>(
    mut oracle: OracleSuite<F>,
    noise: NoiseSpec<F>,
    rng: Rng,
) -> Result<OracleSuite<F>> {
    noise.validate(oracle.dim())?;
    if noise.perturbs_gradient() && !oracle.has_grad() {
        return Err(OptError::IncompatibleNoise(format!(
            "{:?} requires a gradient oracle, `{}` has none",
            noise,
            oracle.name()
        )));
    }
    oracle.set_noise(noise, rng);
    Ok(oracle)
}

fn bound_slack<F: Scalar>(bound: F) -> F {
    bound * (F::one() + F::lit(64.0) * F::epsilon()) + F::min_positive_value()
}

pub(crate) fn perturb_grad<F: Scalar>(spec: &NoiseSpec<F>, rng: &mut Rng, g: Vector<F>) -> Vector<F> {
    match spec {
        NoiseSpec::AbsoluteGrad { delta, mode } => {
            let v = match mode {
                AbsMode::Fixed(v) => v.clone(),
                AbsMode::RandomDirection => rng.sphere::<F>(g.dim()).scaled(*delta),
            };
            assert!(
                v.norm() <= bound_slack(*delta),
                "absolute noise bound violated: {} > {}",
                v.norm(),
                delta
            );
            &g + &v
        }
        NoiseSpec::RelativeGrad { alpha, mode } => {
            let out = match mode {
                RelMode::Shrink => g.scaled(F::one() - *alpha),
                RelMode::Grow => g.scaled(F::one() + *alpha),
                RelMode::RandomDirection => {
                    let e = rng.sphere::<F>(g.dim());
                    g.plus_scaled(*alpha * g.norm(), &e)
                }
            };
            assert!(
                out.dist(&g) <= bound_slack(*alpha * g.norm()),
                "relative noise bound violated"
            );
            out
        }
        NoiseSpec::AdditiveStochGrad { sigma, dist } => {
            let mut out = g;
            for i in 0..out.dim() {
                let z = match dist {
                    StochDist::Gaussian => rng.gaussian(),
                    StochDist::StudentT3 => rng.student_t(3.0) / 3f64.sqrt(),
                };
                out[i] += *sigma * F::lit(z);
            }
            out
        }
        _ => g,
    }
}

pub(crate) fn value_noise<F: Scalar>(
    spec: &NoiseSpec<F>,
    rng: &mut Rng,
    x: &Vector<F>,
    xstar: Option<&Vector<F>>,
) -> F {
    let xi = match spec {
        NoiseSpec::ZoBoundedValue { delta, mode } => match mode {
            ZoBoundedMode::DeterministicWorst => {
                let s = match xstar {
                    Some(xs) => (x - xs).sum(),
                    None => x.sum(),
                };
                if s >= F::zero() {
                    *delta
                } else {
                    -*delta
                }
            }
            ZoBoundedMode::Random => *delta * F::lit(rng.uniform_pm1()),
        },
        NoiseSpec::ZoStochValue { delta_tilde } => *delta_tilde * F::lit(rng.rademacher()),
        _ => return F::zero(),
    };
    if let NoiseSpec::ZoBoundedValue { delta, .. } = spec {
        assert!(xi.abs() <= *delta, "bounded value noise violated");
    }
    xi
}
