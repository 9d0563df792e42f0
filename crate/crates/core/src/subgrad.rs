//! Nonsmooth methods: Polyak-step and constant-step subgradient descent, the
//! adaptive switching scheme for problems with a functional constraint, and its
//! restarted version.

use log::warn;

use crate::error::{OptError, Result};
use crate::oracle::OracleSuite;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;
use crate::trace::{Outcome, Recorder, RunControl, Status, Trace};
use crate::vector::{RunningMean, Vector};

#[derive(Clone, Debug, PartialEq)]
pub enum StepRule<F> {
    /// `h_k = (f(x^k) − f*)/||∇f(x^k)||²`
    Polyak { fstar: F },
    Fixed { h: F },
    /// `h = R/(M√N)`
    Budget { m: F, r: F, n: usize },
}

impl<F: Scalar> StepRule<F> {
    pub fn budget_step(m: F, r: F, n: usize) -> F {
        r / (m * F::from_usize_lossy(n).sqrt())
    }
}

#[derive(Clone, Debug)]
pub struct SubgradConfig<F> {
    pub step_rule: StepRule<F>,
    /// Iteration budget `N`.
    pub budget: usize,
    pub tol: F,
    pub averaging: bool,
    pub control: RunControl<F>,
}

impl<F: Scalar> SubgradConfig<F> {
    /// Budget defaults to `n` for [`StepRule::Budget`].
    pub fn new(step_rule: StepRule<F>, budget: usize) -> Self {
        Self {
            step_rule,
            budget,
            tol: F::zero(),
            averaging: false,
            control: RunControl::default(),
        }
    }

    pub fn with_tol(mut self, tol: F) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_averaging(mut self, on: bool) -> Self {
        self.averaging = on;
        self
    }

    pub fn with_control(mut self, control: RunControl<F>) -> Self {
        self.control = control;
        self
    }
}

fn check_start<F: Scalar>(set: &FeasibleSet<F>, x0: &Vector<F>, dim: usize) -> Result<Vector<F>> {
    x0.check_dim(dim)?;
    set.project(x0)
}

/// Projected subgradient descent with the Polyak step.
///
/// Stops as soon as `f(x^k) − f* ≤ tol`, before the step would divide by zero.
pub fn run_polyak_subgrad<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &SubgradConfig<F>,
) -> Result<Outcome<F>> {
    let StepRule::Polyak { fstar } = cfg.step_rule else {
        return Err(OptError::InvalidConfig("run_polyak_subgrad needs StepRule::Polyak".into()));
    };
    if !fstar.is_finite() {
        return Err(OptError::InvalidConfig("Polyak step needs a finite f*".into()));
    }
    let mut x = check_start(set, x0, oracle.dim())?;
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut k = 0;
    let status = loop {
        let f = oracle.value(&x);
        let gap = f - fstar;
        if gap <= cfg.tol {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::Converged;
        }
        if k >= cfg.budget || cfg.control.would_exceed(oracle, 2) {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::BudgetExhausted;
        }
        let g = oracle.subgrad(&x);
        let gn2 = g.norm_sq();
        if gn2 == F::zero() {
            return Err(OptError::ZeroSubgradient {
                iter: k,
                gap: gap.as_f64(),
            });
        }
        let h = gap / gn2;
        let d = rec.push(oracle, k, &x, f, Some(gn2.sqrt()), h);
        if rec.diverged(d, f) {
            break Status::Diverged;
        }
        x = set.project(&x.plus_scaled(-h, &g))?;
        k += 1;
    };
    Ok(Outcome {
        x,
        trace: rec.finish(status),
    })
}

/// Constant-step projected subgradient descent.
///
/// With averaging the reported point is `x̄ = (1/N)Σ_{k<N} x^k`, recorded as the
/// final row with `iter = N`; otherwise it is `x^N`.
pub fn run_const_subgrad<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &SubgradConfig<F>,
) -> Result<Outcome<F>> {
    let n = cfg.budget;
    if n == 0 {
        return Err(OptError::InvalidConfig("budget N must be ≥ 1".into()));
    }
    let h = match cfg.step_rule {
        StepRule::Fixed { h } => h,
        StepRule::Budget { m, r, n } => {
            if n == 0 {
                return Err(OptError::InvalidConfig("BudgetStep N must be ≥ 1".into()));
            }
            StepRule::budget_step(m, r, n)
        }
        StepRule::Polyak { .. } => {
            return Err(OptError::InvalidConfig("run_const_subgrad needs Fixed or Budget step".into()))
        }
    };
    if !(h > F::zero()) || !h.is_finite() {
        return Err(OptError::InvalidConfig(format!("step must be > 0, got {h}")));
    }
    let mut x = check_start(set, x0, oracle.dim())?;
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut mean = RunningMean::new(x.dim());
    let mut status = Status::BudgetExhausted;
    let mut done = 0;
    for k in 0..n {
        if cfg.control.would_exceed(oracle, 2) {
            break;
        }
        mean.push(&x);
        done = k + 1;
        let f = oracle.value(&x);
        let need_step = k + 1 < n || !cfg.averaging;
        if !need_step {
            rec.push(oracle, k, &x, f, None, F::zero());
            break;
        }
        let g = oracle.subgrad(&x);
        let d = rec.push(oracle, k, &x, f, Some(g.norm()), h);
        if rec.diverged(d, f) {
            status = Status::Diverged;
            break;
        }
        x = set.project(&x.plus_scaled(-h, &g))?;
    }
    let out = if cfg.averaging {
        mean.into_mean()
    } else {
        x
    };
    if status != Status::Diverged {
        let f = oracle.value(&out);
        rec.push(oracle, done.max(1), &out, f, None, F::zero());
    }
    Ok(Outcome {
        x: out,
        trace: rec.finish(status),
    })
}

#[derive(Clone, Debug)]
pub struct SwitchingConfig<F> {
    pub delta: F,
    /// Requires `2θ₀² ≥ ||x* − x⁰||²`.
    pub theta0: F,
    pub mg: F,
    /// Hard iteration cap (per run for restarts).
    pub max_iters: usize,
    pub eps_target: Option<F>,
    pub alpha_sharp: Option<F>,
    pub control: RunControl<F>,
}

impl<F: Scalar> SwitchingConfig<F> {
    pub fn new(delta: F, theta0: F, mg: F, max_iters: usize) -> Self {
        Self {
            delta,
            theta0,
            mg,
            max_iters,
            eps_target: None,
            alpha_sharp: None,
            control: RunControl::default(),
        }
    }

    pub fn with_restarts(mut self, eps_target: F, alpha_sharp: F) -> Self {
        self.eps_target = Some(eps_target);
        self.alpha_sharp = Some(alpha_sharp);
        self
    }

    pub fn with_control(mut self, control: RunControl<F>) -> Self {
        self.control = control;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("delta", self.delta), ("theta0", self.theta0), ("Mg", self.mg)] {
            if !(v > F::zero()) || !v.is_finite() {
                return Err(OptError::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(OptError::InvalidConfig("iteration cap must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SwitchingRun<F> {
    pub x_hat: Vector<F>,
    pub trace: Trace<F>,
    /// One flag per step: productive (objective) or not (constraint).
    pub productive: Vec<bool>,
    pub iterations: usize,
    /// Subgradient calls on `f` and `g` together.
    pub subgrad_calls: u64,
}

impl<F> SwitchingRun<F> {
    pub fn productive_count(&self) -> usize {
        self.productive.iter().filter(|&&p| p).count()
    }
}

/// `2θ₀²/δ²`, with a relative slack of a few ulps so that an exactly attained
/// threshold is not missed because of rounding in the ratio.
fn stop_threshold<F: Scalar>(theta0: F, delta: F) -> F {
    let t = F::lit(2.0) * theta0 * theta0 / (delta * delta);
    t * (F::one() - F::lit(8.0) * F::epsilon())
}

struct SwitchingState<'a, F: Scalar> {
    rec: &'a mut Recorder<F>,
    iter_offset: usize,
}

fn switching_core<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    delta: F,
    theta0: F,
    cfg: &SwitchingConfig<F>,
    state: SwitchingState<'_, F>,
) -> Result<(Vector<F>, Vec<bool>, Status)> {
    let rec = state.rec;
    let threshold = stop_threshold(theta0, delta);
    let level = delta * cfg.mg;
    let mut x = check_start(set, x0, oracle.dim())?;
    let mut sum = F::zero();
    let mut flags = Vec::new();
    let mut best: Option<(F, Vector<F>)> = None;
    let status = loop {
        let n = flags.len();
        if n >= cfg.max_iters || cfg.control.would_exceed(oracle, 2) {
            break Status::BudgetExhausted;
        }
        let gval = oracle.constraint_value(&x)?;
        let (h, gnorm, step_dir) = if gval <= level {
            let f = oracle.value(&x);
            let gf = oracle.subgrad(&x);
            if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, x.clone()));
            }
            let n2 = gf.norm_sq();
            flags.push(true);
            if n2 == F::zero() {
                rec.push(oracle, state.iter_offset + n, &x, f, Some(F::zero()), F::zero());
                best = Some((f, x.clone()));
                break Status::Converged;
            }
            sum += F::one() / n2;
            (delta / n2, n2.sqrt(), gf)
        } else {
            let gg = oracle.constraint_subgrad(&x)?;
            let gn = gg.norm();
            if gn == F::zero() {
                return Err(OptError::ZeroSubgradient {
                    iter: n,
                    gap: gval.as_f64(),
                });
            }
            if gn > cfg.mg * (F::one() + F::lit(1e-12)) {
                warn!("constraint subgradient norm {gn} exceeds Mg = {}", cfg.mg);
            }
            flags.push(false);
            sum += F::one();
            (delta / gn, gn, gg)
        };
        debug_assert!(!flags[n] || gval <= level);
        let fv = oracle.true_value(&x);
        let d = rec.push(oracle, state.iter_offset + n, &x, fv, Some(gnorm), h);
        if rec.diverged(d, fv) {
            break Status::Diverged;
        }
        x = set.project(&x.plus_scaled(-h, &step_dir))?;
        if sum >= threshold {
            break Status::Converged;
        }
    };
    match best {
        Some((_, xh)) => Ok((xh, flags, status)),
        None if status == Status::Converged => Err(OptError::NoProductiveSteps),
        None => Ok((x, flags, status)),
    }
}

/// Adaptive switching subgradient scheme for `min f` s.t. `g(x) ≤ 0`.
///
/// Productive step `h = δ/||∇f||²` when `g(x) ≤ δM_g`, otherwise `h = δ/||∇g||`.
/// Stops once `2θ₀²/δ² ≤ Σ_{k∈I} 1/||∇f(x^k)||² + N − |I|` and returns the best
/// productive iterate. Trace values are uncounted diagnostics.
pub fn run_switching<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &SwitchingConfig<F>,
) -> Result<SwitchingRun<F>> {
    cfg.validate()?;
    if !oracle.has_constraint() {
        return Err(OptError::MissingOracle("a functional constraint"));
    }
    let start_calls = oracle.calls().first_order();
    let mut rec = Recorder::new(x0, &cfg.control);
    let (x_hat, productive, status) = switching_core(
        oracle,
        set,
        x0,
        cfg.delta,
        cfg.theta0,
        cfg,
        SwitchingState {
            rec: &mut rec,
            iter_offset: 0,
        },
    )?;
    let fv = oracle.true_value(&x_hat);
    rec.push(oracle, productive.len(), &x_hat, fv, None, F::zero());
    Ok(SwitchingRun {
        x_hat,
        iterations: productive.len(),
        productive,
        trace: rec.finish(status),
        subgrad_calls: oracle.calls().first_order() - start_calls,
    })
}

#[derive(Clone, Debug)]
pub struct RestartRun<F> {
    pub x: Vector<F>,
    pub trace: Trace<F>,
    pub restarts: usize,
    pub iterations: usize,
    pub subgrad_calls: u64,
    /// `(θ, δ)` used by each run.
    pub schedule: Vec<(F, F)>,
}

/// `⌈2 log₂(θ₀/ε)⌉`, or 0 when `ε ≥ θ₀`.
pub fn restart_count<F: Scalar>(theta0: F, eps: F) -> usize {
    if eps >= theta0 {
        return 0;
    }
    let v = 2.0 * (theta0 / eps).as_f64().log2();
    (v - 1e-12).ceil().max(1.0) as usize
}

/// `⌈4 max{1,M_f²} max{1,M_g²}/α²⌉ · ⌈2 log₂(θ₀/ε)⌉`
pub fn restart_call_bound<F: Scalar>(mf: F, mg: F, alpha: F, theta0: F, eps: F) -> u64 {
    let one = 1.0f64;
    let per = 4.0 * one.max(mf.as_f64().powi(2)) * one.max(mg.as_f64().powi(2)) / alpha.as_f64().powi(2);
    (per - 1e-12).ceil() as u64 * restart_count(theta0, eps) as u64
}

/// Restarted switching scheme: run `p = 1..P` uses `θ = θ₀/√(2^{p−1})` and
/// `δ = αθ/(√2·max{1,M_g})`, starting from the previous output.
pub fn run_restarted_switching<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &SwitchingConfig<F>,
) -> Result<RestartRun<F>> {
    cfg.validate()?;
    let (Some(eps), Some(alpha)) = (cfg.eps_target, cfg.alpha_sharp) else {
        return Err(OptError::InvalidConfig("restarts need eps_target and alpha_sharp".into()));
    };
    if !(eps > F::zero()) || !(alpha > F::zero()) {
        return Err(OptError::InvalidConfig("eps_target and alpha_sharp must be > 0".into()));
    }
    if !oracle.has_constraint() {
        return Err(OptError::MissingOracle("a functional constraint"));
    }
    let start_calls = oracle.calls().first_order();
    let mut x = check_start(set, x0, oracle.dim())?;
    let mut rec = Recorder::new(&x, &cfg.control);
    let p_max = restart_count(cfg.theta0, eps);
    let sqrt2 = F::lit(2.0).sqrt();
    let mut schedule = Vec::with_capacity(p_max);
    let mut iterations = 0;
    let mut status = Status::Converged;
    for p in 1..=p_max {
        let theta = cfg.theta0 / F::lit(2.0).powi((p - 1) as i32).sqrt();
        let delta = alpha * theta / (sqrt2 * cfg.mg.max(F::one()));
        schedule.push((theta, delta));
        let (xh, flags, st) = switching_core(
            oracle,
            set,
            &x,
            delta,
            theta,
            cfg,
            SwitchingState {
                rec: &mut rec,
                iter_offset: iterations,
            },
        )?;
        iterations += flags.len();
        x = xh;
        if st == Status::Diverged {
            status = st;
            break;
        }
        if st == Status::BudgetExhausted {
            status = st;
        }
    }
    let fv = oracle.true_value(&x);
    rec.push(oracle, iterations, &x, fv, None, F::zero());
    Ok(RestartRun {
        x,
        trace: rec.finish(status),
        restarts: schedule.len(),
        iterations,
        subgrad_calls: oracle.calls().first_order() - start_calls,
        schedule,
    })
}
