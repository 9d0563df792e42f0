//! Kernel-smoothed two-point gradient estimates and zeroth-order projected SGD.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{OptError, Result};
use crate::oracle::OracleSuite;
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;
use crate::stochastic::{validate_step, SgdStep, StepState};
use crate::trace::{Outcome, Recorder, RunControl, Status};
use crate::vector::Vector;

/// Quadrature nodes used for the moment checks.
pub const QUADRATURE_NODES: usize = 64;
const MOMENT_TOL: f64 = 1e-10;

/// Odd polynomial `K(u) = Σ_i coeffs[i]·u^{2i+1}` on `[−1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub beta: u32,
    pub coeffs: Vec<f64>,
}

impl Kernel {
    pub fn eval_f64(&self, u: f64) -> f64 {
        let u2 = u * u;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u2 + c) * u
    }

    pub fn eval<F: Scalar>(&self, u: F) -> F {
        F::lit(self.eval_f64(u.as_f64()))
    }

    /// `E[u^j K(u)]` for `u ~ U[−1, 1]`.
    pub fn moment(&self, j: u32) -> f64 {
        expect_uniform(|u| u.powi(j as i32) * self.eval_f64(u))
    }

    /// `E[|u|^β |K(u)|]`.
    pub fn abs_moment(&self) -> f64 {
        let b = self.beta as f64;
        expect_uniform(|u| u.abs().powf(b) * self.eval_f64(u).abs())
    }

    /// Largest deviation from `E[K]=0, E[uK]=1, E[u^j K]=0 (j=2..β−1)`.
    pub fn moment_error(&self) -> f64 {
        let l = self.beta.saturating_sub(1).max(1);
        (0..=l)
            .map(|j| {
                let target = if j == 1 { 1.0 } else { 0.0 };
                (self.moment(j) - target).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn expect_uniform(f: impl FnMut(f64) -> f64) -> f64 {
    let n = NonZeroUsize::new(QUADRATURE_NODES).expect("nonzero");
    0.5 * GaussLegendre::new(n).integrate(-1.0, 1.0, f)
}

/// Minimal-degree odd kernel for smoothness order `beta ∈ {2,3,4,5}`.
pub fn build_kernel(beta: u32) -> Result<Kernel> {
    let coeffs = match beta {
        2 | 3 => vec![3.0],
        4 | 5 => vec![75.0 / 4.0, -105.0 / 4.0],
        _ => {
            return Err(OptError::InvalidParam {
                name: "beta".into(),
                reason: format!("supported orders are 2..=5, got {beta}"),
            })
        }
    };
    let k = Kernel { beta, coeffs };
    let err = k.moment_error();
    if err > MOMENT_TOL || !k.abs_moment().is_finite() {
        return Err(OptError::InvalidConfig(format!(
            "kernel of order {beta} fails its moment conditions (error {err:e})"
        )));
    }
    Ok(k)
}

/// Mean of `b` samples of `d·(f(x+τre) − f(x−τre))/(2τ)·K(r)·e`, with `e` uniform on the
/// sphere and `r ~ U[−1,1]`. Uses exactly `2b` zeroth-order calls.
pub fn kernel_grad_estimate<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x: &Vector<F>,
    tau: F,
    kernel: &Kernel,
    rng: &mut Rng,
    b: usize,
) -> Result<Vector<F>> {
    if !(tau > F::zero() && tau.is_finite()) {
        return Err(OptError::InvalidParam {
            name: "tau".into(),
            reason: format!("must be > 0, got {tau}"),
        });
    }
    if b == 0 {
        return Err(OptError::InvalidParam {
            name: "batch".into(),
            reason: "must be ≥ 1".into(),
        });
    }
    let d = x.dim();
    let scale = F::from_usize_lossy(d) / (F::lit(2.0) * tau);
    let mut acc = Vector::zeros(d);
    for _ in 0..b {
        let e: Vector<F> = rng.sphere(d);
        let r = F::lit(rng.uniform_pm1());
        let fp = oracle.zo_value(&x.plus_scaled(tau * r, &e));
        let fm = oracle.zo_value(&x.plus_scaled(-tau * r, &e));
        acc.axpy(scale * (fp - fm) * kernel.eval(r), &e);
    }
    if b > 1 {
        acc.scale(F::one() / F::from_usize_lossy(b));
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauSchedule<F> {
    Const { tau: F },
    /// `τ_k = τ₀(k+1)^{−exponent}`
    PowerDecay { tau0: F, exponent: F },
}

impl<F: Scalar> TauSchedule<F> {
    pub fn at(&self, k: usize) -> F {
        match *self {
            TauSchedule::Const { tau } => tau,
            TauSchedule::PowerDecay { tau0, exponent } => {
                tau0 * F::from_usize_lossy(k + 1).powf(-exponent)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZoConfig<F> {
    pub n: usize,
    pub tau: TauSchedule<F>,
    pub step: SgdStep<F>,
    pub batch: usize,
    pub kernel: Kernel,
    pub control: RunControl<F>,
}

impl<F: Scalar> ZoConfig<F> {
    pub fn new(n: usize, tau: TauSchedule<F>, step: SgdStep<F>, kernel: Kernel) -> Self {
        Self {
            n,
            tau,
            step,
            batch: 1,
            kernel,
            control: RunControl::default(),
        }
    }

    pub fn with_batch(mut self, b: usize) -> Self {
        self.batch = b;
        self
    }

    pub fn with_control(mut self, control: RunControl<F>) -> Self {
        self.control = control;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(OptError::InvalidConfig("N must be ≥ 1".into()));
        }
        if self.batch == 0 {
            return Err(OptError::InvalidConfig("batch must be ≥ 1".into()));
        }
        match self.tau {
            TauSchedule::Const { tau } if !(tau > F::zero() && tau.is_finite()) => {
                return Err(OptError::InvalidConfig(format!("tau must be > 0, got {tau}")))
            }
            TauSchedule::PowerDecay { tau0, exponent }
                if !(tau0 > F::zero() && tau0.is_finite() && exponent >= F::zero()) =>
            {
                return Err(OptError::InvalidConfig(
                    "PowerDecay needs tau0 > 0 and exponent ≥ 0".into(),
                ))
            }
            _ => {}
        }
        validate_step(&self.step)
    }
}

#[derive(Clone, Debug)]
pub struct ZoRun<F> {
    pub outcome: Outcome<F>,
    pub taus: Vec<F>,
    pub steps: Vec<F>,
}

/// `x^{k+1} = π_Q(x^k − γ_k ∇̃f(x^k))`. Trace values are exact and uncounted, so
/// `oracle_calls` is `2b` per iteration.
pub fn run_zo_sgd<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &ZoConfig<F>,
    rng: &mut Rng,
) -> Result<ZoRun<F>> {
    cfg.validate()?;
    x0.check_dim(oracle.dim())?;
    let mut x = set.project(x0)?;
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut schedule = StepState::new(cfg.step);
    let mut taus = Vec::with_capacity(cfg.n);
    let mut steps = Vec::with_capacity(cfg.n);
    let cost = 2 * cfg.batch as u64;
    let mut status = Status::BudgetExhausted;
    let mut k = 0;
    while k < cfg.n {
        if cfg.control.would_exceed(oracle, cost) {
            break;
        }
        let f = oracle.true_value(&x);
        let tau = cfg.tau.at(k);
        let g = kernel_grad_estimate(oracle, &x, tau, &cfg.kernel, rng, cfg.batch)?;
        let gn = g.norm();
        let gamma = schedule.next(k, gn);
        taus.push(tau);
        steps.push(gamma);
        let d = rec.push(oracle, k, &x, f, Some(gn), gamma);
        if rec.diverged(d, f) {
            status = Status::Diverged;
            break;
        }
        x = set.project(&x.plus_scaled(-gamma, &g))?;
        k += 1;
    }
    if status != Status::Diverged {
        let f = oracle.true_value(&x);
        rec.push(oracle, k, &x, f, None, F::zero());
    }
    Ok(ZoRun {
        outcome: Outcome {
            x,
            trace: rec.finish(status),
        },
        taus,
        steps,
    })
}
