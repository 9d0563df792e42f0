//! Oracle access to a problem: values, subgradients, gradients and noisy
//! zeroth-order values, with call counting and known constants.

use std::fmt;
use std::sync::Arc;

use crate::error::{OptError, Result};
use crate::linalg::Matrix;
use crate::noise::{self, NoiseSpec};
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// `f(x) = ½xᵀAx − bᵀx + c`
#[derive(Clone, Debug)]
pub struct Quadratic<F> {
    pub a: Matrix<F>,
    pub b: Vector<F>,
    pub c: F,
}

impl<F: Scalar> Quadratic<F> {
    pub fn value(&self, x: &Vector<F>) -> F {
        F::lit(0.5) * x.dot(&self.a.matvec(x)) - self.b.dot(x) + self.c
    }

    pub fn grad(&self, x: &Vector<F>) -> Vector<F> {
        let mut g = self.a.matvec(x);
        g.axpy(-F::one(), &self.b);
        g
    }
}

/// An objective `f: ℝᵈ → ℝ`. Subgradient selection must be deterministic.
pub trait Problem<F: Scalar>: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector<F>) -> F;
    fn subgrad(&self, x: &Vector<F>) -> Vector<F>;

    fn grad(&self, _x: &Vector<F>) -> Option<Vector<F>> {
        None
    }

    fn has_grad(&self) -> bool {
        false
    }

    fn quadratic(&self) -> Option<&Quadratic<F>> {
        None
    }

    /// Distance to the solution set when it is not the single point `x*`.
    fn dist_to_solution(&self, _x: &Vector<F>) -> Option<F> {
        None
    }

    fn default_start(&self) -> Vector<F> {
        Vector::zeros(self.dim())
    }
}

type ValueFn<F> = Arc<dyn Fn(&Vector<F>) -> F + Send + Sync>;
type VecFn<F> = Arc<dyn Fn(&Vector<F>) -> Vector<F> + Send + Sync>;

/// A problem assembled from closures, for ad-hoc objectives.
#[derive(Clone)]
pub struct FnProblem<F> {
    name: String,
    dim: usize,
    value: ValueFn<F>,
    subgrad: VecFn<F>,
    smooth: bool,
    start: Option<Vector<F>>,
}

impl<F: Scalar> FnProblem<F> {
    /// Nonsmooth objective with the given subgradient selection.
    pub fn nonsmooth(
        name: &str,
        dim: usize,
        value: impl Fn(&Vector<F>) -> F + Send + Sync + 'static,
        subgrad: impl Fn(&Vector<F>) -> Vector<F> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_string(),
            dim,
            value: Arc::new(value),
            subgrad: Arc::new(subgrad),
            smooth: false,
            start: None,
        }
    }

    /// Differentiable objective; `grad` also serves as the subgradient.
    pub fn smooth(
        name: &str,
        dim: usize,
        value: impl Fn(&Vector<F>) -> F + Send + Sync + 'static,
        grad: impl Fn(&Vector<F>) -> Vector<F> + Send + Sync + 'static,
    ) -> Self {
        let mut p = Self::nonsmooth(name, dim, value, grad);
        p.smooth = true;
        p
    }

    pub fn with_start(mut self, x0: Vector<F>) -> Self {
        self.start = Some(x0);
        self
    }
}

impl<F: Scalar> Problem<F> for FnProblem<F> {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Vector<F>) -> F {
        (self.value)(x)
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        (self.subgrad)(x)
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        self.smooth.then(|| (self.subgrad)(x))
    }
    fn has_grad(&self) -> bool {
        self.smooth
    }
    fn default_start(&self) -> Vector<F> {
        self.start.clone().unwrap_or_else(|| Vector::zeros(self.dim))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constants<F> {
    /// Lipschitz constant of the gradient.
    pub l: Option<F>,
    /// Lipschitz constant of `f`.
    pub m: Option<F>,
    /// PL / strong convexity constant.
    pub mu: Option<F>,
    pub alpha_sharp: Option<F>,
    /// `ρ` such that `f + (ρ/2)||·||²` is convex.
    pub weak_convexity: Option<F>,
    /// Lipschitz constant of the functional constraint.
    pub mg: Option<F>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CallCounts {
    pub value: u64,
    pub subgrad: u64,
    pub grad: u64,
    pub zo_value: u64,
    pub constraint_value: u64,
    pub constraint_subgrad: u64,
}

impl CallCounts {
    pub fn total(&self) -> u64 {
        self.value
            + self.subgrad
            + self.grad
            + self.zo_value
            + self.constraint_value
            + self.constraint_subgrad
    }

    /// First-order calls: subgradients and gradients of `f` and `g`.
    pub fn first_order(&self) -> u64 {
        self.subgrad + self.grad + self.constraint_subgrad
    }
}

/// Bundled oracle for one problem instance.
///
/// Cloning is cheap and yields an independent copy: call counters and the
/// noise stream are per clone, so concurrent runs should each own a clone
/// with its own noise seed (see [`OracleSuite::reseed_noise`]).
#[derive(Clone)]
pub struct OracleSuite<F: Scalar> {
    problem: Arc<dyn Problem<F>>,
    constraint: Option<Arc<dyn Problem<F>>>,
    pub fstar: Option<F>,
    pub xstar: Option<Vector<F>>,
    pub constants: Constants<F>,
    noise: NoiseSpec<F>,
    noise_rng: Rng,
    calls: CallCounts,
}

impl<F: Scalar> fmt::Debug for OracleSuite<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleSuite")
            .field("problem", &self.problem.name())
            .field("dim", &self.problem.dim())
            .field("fstar", &self.fstar)
            .field("xstar", &self.xstar)
            .field("constants", &self.constants)
            .field("noise", &self.noise)
            .field("calls", &self.calls)
            .finish()
    }
}

impl<F: Scalar> OracleSuite<F> {
    pub fn new(problem: impl Problem<F> + 'static) -> Self {
        Self::from_arc(Arc::new(problem))
    }

    pub fn from_arc(problem: Arc<dyn Problem<F>>) -> Self {
        Self {
            problem,
            constraint: None,
            fstar: None,
            xstar: None,
            constants: Constants::default(),
            noise: NoiseSpec::None,
            noise_rng: Rng::new(0),
            calls: CallCounts::default(),
        }
    }

    pub fn with_fstar(mut self, fstar: F) -> Self {
        self.fstar = Some(fstar);
        self
    }

    pub fn with_xstar(mut self, xstar: Vector<F>) -> Self {
        self.xstar = Some(xstar);
        self
    }

    pub fn with_constants(mut self, constants: Constants<F>) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_constraint(mut self, g: impl Problem<F> + 'static) -> Self {
        self.constraint = Some(Arc::new(g));
        self
    }

    /// See [`noise::wrap_noise`].
    pub fn with_noise(self, spec: NoiseSpec<F>, rng: Rng) -> Result<Self> {
        noise::wrap_noise(self, spec, rng)
    }

    pub(crate) fn set_noise(&mut self, spec: NoiseSpec<F>, rng: Rng) {
        self.noise = spec;
        self.noise_rng = rng;
    }

    /// Replace the noise stream, keeping the noise model.
    pub fn reseed_noise(&mut self, rng: Rng) {
        self.noise_rng = rng;
    }

    pub fn noise(&self) -> &NoiseSpec<F> {
        &self.noise
    }

    pub fn name(&self) -> &str {
        self.problem.name()
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn problem(&self) -> &dyn Problem<F> {
        self.problem.as_ref()
    }

    pub fn has_grad(&self) -> bool {
        self.problem.has_grad()
    }

    pub fn has_constraint(&self) -> bool {
        self.constraint.is_some()
    }

    pub fn quadratic(&self) -> Option<&Quadratic<F>> {
        self.problem.quadratic()
    }

    pub fn default_start(&self) -> Vector<F> {
        self.problem.default_start()
    }

    pub fn calls(&self) -> CallCounts {
        self.calls
    }

    pub fn total_calls(&self) -> u64 {
        self.calls.total()
    }

    pub fn reset_calls(&mut self) {
        self.calls = CallCounts::default();
    }

    pub fn value(&mut self, x: &Vector<F>) -> F {
        self.calls.value += 1;
        self.problem.value(x)
    }

    pub fn subgrad(&mut self, x: &Vector<F>) -> Vector<F> {
        self.calls.subgrad += 1;
        self.problem.subgrad(x)
    }

    /// Gradient, perturbed according to the noise model.
    pub fn grad(&mut self, x: &Vector<F>) -> Result<Vector<F>> {
        let g = self
            .problem
            .grad(x)
            .ok_or(OptError::MissingOracle("a gradient"))?;
        self.calls.grad += 1;
        Ok(noise::perturb_grad(&self.noise, &mut self.noise_rng, g))
    }

    /// Zeroth-order value `f(x) + noise`.
    pub fn zo_value(&mut self, x: &Vector<F>) -> F {
        self.calls.zo_value += 1;
        let v = self.problem.value(x);
        v + noise::value_noise(&self.noise, &mut self.noise_rng, x, self.xstar.as_ref())
    }

    pub fn constraint_value(&mut self, x: &Vector<F>) -> Result<F> {
        let g = self
            .constraint
            .as_ref()
            .ok_or(OptError::MissingOracle("a functional constraint"))?;
        self.calls.constraint_value += 1;
        Ok(g.value(x))
    }

    pub fn constraint_subgrad(&mut self, x: &Vector<F>) -> Result<Vector<F>> {
        let g = self
            .constraint
            .as_ref()
            .ok_or(OptError::MissingOracle("a functional constraint"))?;
        self.calls.constraint_subgrad += 1;
        Ok(g.subgrad(x))
    }

    /// Uncounted, noise-free value for diagnostics.
    pub fn true_value(&self, x: &Vector<F>) -> F {
        self.problem.value(x)
    }

    pub fn true_subgrad(&self, x: &Vector<F>) -> Vector<F> {
        self.problem.subgrad(x)
    }

    pub fn true_grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        self.problem.grad(x)
    }

    pub fn true_constraint(&self, x: &Vector<F>) -> Option<F> {
        self.constraint.as_ref().map(|g| g.value(x))
    }

    pub fn gap(&self, x: &Vector<F>) -> Option<F> {
        self.fstar.map(|fs| self.problem.value(x) - fs)
    }

    /// Distance to the solution set if known, else to `x*`.
    pub fn dist_to_opt(&self, x: &Vector<F>) -> Option<F> {
        self.problem
            .dist_to_solution(x)
            .or_else(|| self.xstar.as_ref().map(|xs| x.dist(xs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_calls() {
        let p = FnProblem::smooth("sq", 1, |x: &Vector<f64>| x[0] * x[0], |x| x.scaled(2.0));
        let mut s = OracleSuite::new(p).with_fstar(0.0);
        let x = Vector::from_f64(&[2.0]);
        assert_eq!(s.value(&x), 4.0);
        assert_eq!(s.grad(&x).unwrap()[0], 4.0);
        assert_eq!(s.subgrad(&x)[0], 4.0);
        assert_eq!(s.calls().total(), 3);
        assert_eq!(s.true_value(&x), 4.0);
        assert_eq!(s.calls().total(), 3);
        assert_eq!(s.gap(&x), Some(4.0));
    }

    #[test]
    fn missing_grad_is_error() {
        let p = FnProblem::nonsmooth("abs", 1, |x: &Vector<f64>| x[0].abs(), |x| x.map(f64::signum));
        let mut s = OracleSuite::new(p);
        assert!(matches!(
            s.grad(&Vector::from_f64(&[1.0])),
            Err(OptError::MissingOracle(_))
        ));
        assert!(s.constraint_value(&Vector::from_f64(&[1.0])).is_err());
    }
}
