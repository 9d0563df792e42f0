//! Projected SGD with step schedules, mini-batching, clipping and
//! Polyak–Ruppert averaging, plus parallel Monte Carlo statistics.
//!
//! Stochastic gradients come from [`OracleSuite::grad`]; attach an
//! [`AdditiveStochGrad`](crate::NoiseSpec::AdditiveStochGrad) noise model to get them.

use rayon::prelude::*;

use crate::error::{OptError, Result};
use crate::linalg::Matrix;
use crate::oracle::OracleSuite;
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;
use crate::trace::{Outcome, Recorder, RunControl, Status};
use crate::vector::{RunningMean, Vector};

/// `min{1, λ/||z||}·z`
pub fn clip<F: Scalar>(z: &Vector<F>, lambda: F) -> Vector<F> {
    let n = z.norm();
    if n <= lambda {
        z.clone()
    } else {
        z.scaled(lambda / n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SgdStep<F> {
    Const { gamma: F },
    /// `γ = R/(M√N)`
    BudgetConst { r: F, m: F, n: usize },
    /// `γ_k = 1/(μ(k+1))`
    InvK { mu: F },
    /// `γ_k = R/√(Σ_{j≤k} ||g_j||²)`
    AdaGradNorm { r: F },
    /// `γ_k = γ₀(k+1)^{−η}`, `η ∈ (½, 1)`
    Decay { gamma0: F, eta: F },
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Averaging<F> {
    #[default]
    None,
    /// Mean of `x⁰..x^{N−1}`.
    Uniform,
    /// Mean of the last `⌈qN⌉` of `x⁰..x^{N−1}`.
    Tail(F),
}

#[derive(Clone, Debug)]
pub struct SgdConfig<F> {
    pub n: usize,
    pub batch: usize,
    pub step: SgdStep<F>,
    pub clip_lambda: Option<F>,
    pub averaging: Averaging<F>,
    pub control: RunControl<F>,
}

impl<F: Scalar> SgdConfig<F> {
    pub fn new(n: usize, step: SgdStep<F>) -> Self {
        Self {
            n,
            batch: 1,
            step,
            clip_lambda: None,
            averaging: Averaging::None,
            control: RunControl::default(),
        }
    }

    pub fn with_batch(mut self, b: usize) -> Self {
        self.batch = b;
        self
    }

    pub fn with_clip(mut self, lambda: F) -> Self {
        self.clip_lambda = Some(lambda);
        self
    }

    pub fn with_averaging(mut self, a: Averaging<F>) -> Self {
        self.averaging = a;
        self
    }

    pub fn with_control(mut self, control: RunControl<F>) -> Self {
        self.control = control;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(OptError::InvalidConfig(m));
        let pos = |v: F| v > F::zero() && v.is_finite();
        if self.n == 0 {
            return bad("N must be ≥ 1".into());
        }
        if self.batch == 0 {
            return bad("batch must be ≥ 1".into());
        }
        validate_step(&self.step)?;
        if let Some(l) = self.clip_lambda {
            if !pos(l) {
                return bad(format!("clip lambda must be > 0, got {l}"));
            }
        }
        if let Averaging::Tail(q) = self.averaging {
            if !(q > F::zero() && q <= F::one()) {
                return bad(format!("tail fraction must be in (0, 1], got {q}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SgdRun<F> {
    pub outcome: Outcome<F>,
    /// `γ_k` per iteration.
    pub steps: Vec<F>,
    /// `||x^k − γ_k ĝ_k − x^k||` before projection, per iteration.
    pub applied_norms: Vec<F>,
}

/// Evaluates an [`SgdStep`] schedule; AdaGrad state lives here.
#[derive(Clone, Debug)]
pub(crate) struct StepState<F> {
    step: SgdStep<F>,
    grad_sq_sum: F,
}

impl<F: Scalar> StepState<F> {
    pub(crate) fn new(step: SgdStep<F>) -> Self {
        Self {
            step,
            grad_sq_sum: F::zero(),
        }
    }

    /// `γ_k` given the norm of the direction about to be applied.
    pub(crate) fn next(&mut self, k: usize, gn: F) -> F {
        match self.step {
            SgdStep::Const { gamma } => gamma,
            SgdStep::BudgetConst { r, m, n } => r / (m * F::from_usize_lossy(n).sqrt()),
            SgdStep::InvK { mu } => F::one() / (mu * F::from_usize_lossy(k + 1)),
            SgdStep::AdaGradNorm { r } => {
                self.grad_sq_sum += gn * gn;
                if self.grad_sq_sum > F::zero() {
                    r / self.grad_sq_sum.sqrt()
                } else {
                    F::zero()
                }
            }
            SgdStep::Decay { gamma0, eta } => gamma0 * F::from_usize_lossy(k + 1).powf(-eta),
        }
    }
}

pub(crate) fn validate_step<F: Scalar>(step: &SgdStep<F>) -> Result<()> {
    let bad = |m: String| Err(OptError::InvalidConfig(m));
    let pos = |v: F| v > F::zero() && v.is_finite();
    match *step {
        SgdStep::Const { gamma } if !pos(gamma) => bad(format!("gamma must be > 0, got {gamma}")),
        SgdStep::BudgetConst { r, m, n } if !(pos(r) && pos(m) && n > 0) => {
            bad("BudgetConst needs R > 0, M > 0, N ≥ 1".into())
        }
        SgdStep::InvK { mu } if !pos(mu) => bad(format!("InvK needs mu > 0, got {mu}")),
        SgdStep::AdaGradNorm { r } if !pos(r) => bad(format!("AdaGradNorm needs R > 0, got {r}")),
        SgdStep::Decay { gamma0, eta } => {
            if !pos(gamma0) {
                bad(format!("Decay needs gamma0 > 0, got {gamma0}"))
            } else if !(eta > F::lit(0.5) && eta < F::one()) {
                bad(format!("Decay needs eta in (0.5, 1), got {eta}"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

/// Mean of `b` independent oracle gradients at `x`.
pub fn batch_grad<F: Scalar>(oracle: &mut OracleSuite<F>, x: &Vector<F>, b: usize) -> Result<Vector<F>> {
    let mut g = oracle.grad(x)?;
    if b > 1 {
        for _ in 1..b {
            let gi = oracle.grad(x)?;
            g.axpy(F::one(), &gi);
        }
        g.scale(F::one() / F::from_usize_lossy(b));
    }
    Ok(g)
}

/// `x^{k+1} = π_Q(x^k − γ_k ĝ_k)` where `ĝ_k` is the (clipped) batch mean.
pub fn run_sgd<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &SgdConfig<F>,
) -> Result<SgdRun<F>> {
    cfg.validate()?;
    x0.check_dim(oracle.dim())?;
    let n = cfg.n;
    let tail_start = match cfg.averaging {
        Averaging::Tail(q) => {
            let len = (q.as_f64() * n as f64 - 1e-9).ceil().max(1.0) as usize;
            n - len.min(n)
        }
        _ => 0,
    };
    let mut x = set.project(x0)?;
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut mean = RunningMean::new(x.dim());
    let mut steps = Vec::with_capacity(n);
    let mut applied_norms = Vec::with_capacity(n);
    let mut schedule = StepState::new(cfg.step);
    let cost = cfg.batch as u64 + 1;
    let mut status = Status::BudgetExhausted;
    let mut k = 0;
    while k < n {
        if cfg.control.would_exceed(oracle, cost) {
            break;
        }
        if !matches!(cfg.averaging, Averaging::None) && k >= tail_start {
            mean.push(&x);
        }
        let f = oracle.value(&x);
        let mut g = batch_grad(oracle, &x, cfg.batch)?;
        if let Some(l) = cfg.clip_lambda {
            g = clip(&g, l);
        }
        let gn = g.norm();
        let gamma = schedule.next(k, gn);
        steps.push(gamma);
        applied_norms.push(gamma * gn);
        let d = rec.push(oracle, k, &x, f, Some(gn), gamma);
        if rec.diverged(d, f) {
            status = Status::Diverged;
            break;
        }
        x = set.project(&x.plus_scaled(-gamma, &g))?;
        k += 1;
    }
    let out = match cfg.averaging {
        Averaging::None => x,
        _ if mean.count() == 0 => x,
        _ => mean.into_mean(),
    };
    if status != Status::Diverged {
        let f = oracle.value(&out);
        rec.push(oracle, k, &out, f, None, F::zero());
    }
    Ok(SgdRun {
        outcome: Outcome {
            x: out,
            trace: rec.finish(status),
        },
        steps,
        applied_norms,
    })
}

#[derive(Clone, Debug)]
pub struct MonteCarloStats<F> {
    pub replicas: usize,
    pub mean: Vector<F>,
    /// Unbiased sample covariance.
    pub covariance: Matrix<F>,
    pub seed: u64,
}

/// Runs `run(replica_seed)` for `replicas` seeds `derive_seed(seed, i)` in parallel
/// and returns the sample mean and covariance of the outputs. The result does not
/// depend on scheduling: outputs are collected in replica order.
pub fn monte_carlo_mean_cov<F, R>(replicas: usize, seed: u64, run: R) -> Result<MonteCarloStats<F>>
where
    F: Scalar,
    R: Fn(u64) -> Result<Vector<F>> + Sync + Send,
{
    if replicas < 2 {
        return Err(OptError::InsufficientData(format!(
            "need at least 2 replicas, got {replicas}"
        )));
    }
    let outs: Vec<Vector<F>> = (0..replicas)
        .into_par_iter()
        .map(|i| run(derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let d = outs[0].dim();
    for o in &outs {
        o.check_dim(d)?;
    }
    let mut mean = Vector::zeros(d);
    for o in &outs {
        mean.axpy(F::one(), o);
    }
    mean.scale(F::one() / F::from_usize_lossy(replicas));
    let mut cov = Matrix::zeros(d, d);
    for o in &outs {
        let c = o - &mean;
        for i in 0..d {
            for j in 0..=i {
                cov.set(i, j, cov.get(i, j) + c[i] * c[j]);
            }
        }
    }
    let denom = F::from_usize_lossy(replicas - 1);
    for i in 0..d {
        for j in 0..=i {
            let v = cov.get(i, j) / denom;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok(MonteCarloStats {
        replicas,
        mean,
        covariance: cov,
        seed,
    })
}
