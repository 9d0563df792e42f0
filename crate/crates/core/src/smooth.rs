//! Gradient descent for L-smooth objectives: exact gradients, absolutely
//! inexact gradients with early stopping, and relatively inexact gradients with
//! a fixed or adaptive step.
//!
//! The methods read gradients through [`OracleSuite::grad`], so whatever noise
//! model the oracle carries is what they see. Trace values are exact `f`.

use crate::error::{OptError, Result};
use crate::oracle::OracleSuite;
use crate::scalar::Scalar;
use crate::trace::{Outcome, Recorder, RunControl, Status};
use crate::vector::Vector;

pub const MAX_DOUBLINGS: usize = 60;
const L_MIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum SmoothMode<F> {
    Exact,
    /// Early stop once `||∇̃f|| ≤ c·Δ`; `c = 0` disables it.
    AbsNoise { delta: F, c: F },
    /// Step `(1/L)(1−α)/(1+α)²`.
    RelNoise { alpha: F },
    /// Step `(1/L_{k+1})(1−2α)/(1−α)` with `L_{k+1}` found by doubling from `L0`.
    RelNoiseAdaptive { alpha: F, l0: F },
}

#[derive(Clone, Debug)]
pub struct SmoothConfig<F> {
    /// Iteration budget `N`.
    pub n: usize,
    /// Gradient Lipschitz constant (ignored by the adaptive mode).
    pub l: F,
    pub mode: SmoothMode<F>,
    /// Converged once the observed gradient norm is `≤ tol`.
    pub tol: F,
    /// Adaptive mode only: start each iteration from `L_k/2` (default) or from `L_k`.
    pub halving: bool,
    pub control: RunControl<F>,
}

impl<F: Scalar> SmoothConfig<F> {
    pub fn new(n: usize, l: F, mode: SmoothMode<F>) -> Self {
        Self {
            n,
            l,
            mode,
            tol: F::lit(1e-10),
            halving: true,
            control: RunControl::default(),
        }
    }

    pub fn exact(n: usize, l: F) -> Self {
        Self::new(n, l, SmoothMode::Exact)
    }

    pub fn with_tol(mut self, tol: F) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_halving(mut self, on: bool) -> Self {
        self.halving = on;
        self
    }

    pub fn with_control(mut self, control: RunControl<F>) -> Self {
        self.control = control;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(OptError::InvalidConfig(m));
        if !(self.tol >= F::zero()) {
            return bad(format!("tol must be ≥ 0, got {}", self.tol));
        }
        let needs_l = !matches!(self.mode, SmoothMode::RelNoiseAdaptive { .. });
        if needs_l && (!(self.l > F::zero()) || !self.l.is_finite()) {
            return bad(format!("L must be > 0, got {}", self.l));
        }
        match self.mode {
            SmoothMode::Exact => Ok(()),
            SmoothMode::AbsNoise { delta, c } => {
                if delta >= F::zero() && c >= F::zero() {
                    Ok(())
                } else {
                    bad(format!("need delta ≥ 0 and c ≥ 0, got delta={delta}, c={c}"))
                }
            }
            SmoothMode::RelNoise { alpha } => {
                if alpha >= F::zero() && alpha < F::one() {
                    Ok(())
                } else {
                    bad(format!("relative noise needs 0 ≤ alpha < 1, got {alpha}"))
                }
            }
            SmoothMode::RelNoiseAdaptive { alpha, l0 } => {
                if !(alpha >= F::zero() && alpha < F::lit(0.5)) {
                    return bad(format!(
                        "adaptive step needs 0 ≤ alpha < 0.5 so that (1−2α)/(1−α) > 0, got {alpha}"
                    ));
                }
                if !(l0 > F::zero()) || !l0.is_finite() {
                    return bad(format!("L0 must be > 0, got {l0}"));
                }
                Ok(())
            }
        }
    }
}

/// Step of the fixed-step relative-noise method.
pub fn rel_fixed_step<F: Scalar>(l: F, alpha: F) -> F {
    let one = F::one();
    (one - alpha) / ((one + alpha) * (one + alpha)) / l
}

/// Per-step contraction `1 − (μ/L)(1−α)²/(1+α)²` of the fixed-step relative-noise method.
pub fn rel_fixed_rate<F: Scalar>(l: F, mu: F, alpha: F) -> F {
    let one = F::one();
    let r = (one - alpha) / (one + alpha);
    one - mu / l * r * r
}

/// Per-step contraction `1 − (μ/2L)(1−2α)²` of the adaptive method when `L0 ≤ 2L`.
pub fn rel_adaptive_rate<F: Scalar>(l: F, mu: F, alpha: F) -> F {
    let one = F::one();
    let t = one - F::lit(2.0) * alpha;
    one - mu / (F::lit(2.0) * l) * t * t
}

fn fixed_step_gd<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &SmoothConfig<F>,
    h: F,
    early_stop: F,
) -> Result<Outcome<F>> {
    x0.check_dim(oracle.dim())?;
    let mut x = x0.clone();
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut k = 0;
    let status = loop {
        let f = oracle.value(&x);
        if !f.is_finite() {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::Diverged;
        }
        if cfg.control.would_exceed(oracle, 2) {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::BudgetExhausted;
        }
        let g = oracle.grad(&x)?;
        let gn = g.norm();
        if gn <= early_stop.max(cfg.tol) {
            rec.push(oracle, k, &x, f, Some(gn), F::zero());
            break if early_stop > cfg.tol {
                Status::EarlyStopped
            } else {
                Status::Converged
            };
        }
        if k >= cfg.n {
            rec.push(oracle, k, &x, f, Some(gn), F::zero());
            break Status::BudgetExhausted;
        }
        let d = rec.push(oracle, k, &x, f, Some(gn), h);
        if rec.diverged(d, f) {
            break Status::Diverged;
        }
        x.axpy(-h, &g);
        k += 1;
    };
    Ok(Outcome {
        x,
        trace: rec.finish(status),
    })
}

/// `x^{k+1} = x^k − (1/L)∇f(x^k)`.
pub fn run_gd<F: Scalar>(oracle: &mut OracleSuite<F>, x0: &Vector<F>, cfg: &SmoothConfig<F>) -> Result<Outcome<F>> {
    cfg.validate()?;
    if cfg.mode != SmoothMode::Exact {
        return Err(OptError::InvalidConfig("run_gd needs SmoothMode::Exact".into()));
    }
    fixed_step_gd(oracle, x0, cfg, F::one() / cfg.l, F::zero())
}

/// Step `1/L` on absolutely inexact gradients, stopping early once `||∇̃f|| ≤ cΔ`.
pub fn run_gd_abs<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &SmoothConfig<F>,
) -> Result<Outcome<F>> {
    cfg.validate()?;
    let SmoothMode::AbsNoise { delta, c } = cfg.mode else {
        return Err(OptError::InvalidConfig("run_gd_abs needs SmoothMode::AbsNoise".into()));
    };
    fixed_step_gd(oracle, x0, cfg, F::one() / cfg.l, c * delta)
}

/// Step `(1/L)(1−α)/(1+α)²` on relatively inexact gradients.
pub fn run_gd_rel<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &SmoothConfig<F>,
) -> Result<Outcome<F>> {
    cfg.validate()?;
    let SmoothMode::RelNoise { alpha } = cfg.mode else {
        return Err(OptError::InvalidConfig("run_gd_rel needs SmoothMode::RelNoise".into()));
    };
    fixed_step_gd(oracle, x0, cfg, rel_fixed_step(cfg.l, alpha), F::zero())
}

#[derive(Clone, Debug)]
pub struct AdaptiveRun<F> {
    pub outcome: Outcome<F>,
    /// Accepted `L_{k+1}` per iteration.
    pub l_history: Vec<F>,
    pub doublings: usize,
}

/// Adaptive step with the exit criterion
/// `f(x⁺) ≤ f(x) + ⟨∇̃f, x⁺−x⟩ + (L_{k+1}/2)||x⁺−x||² + α/(1−α)·||∇̃f||·||x⁺−x||`,
/// doubling `L_{k+1}` until it holds. A relative slack of a few ulps of `|f(x)|`
/// absorbs rounding once the gap is tiny.
pub fn run_gd_rel_adaptive<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &SmoothConfig<F>,
) -> Result<AdaptiveRun<F>> {
    cfg.validate()?;
    let SmoothMode::RelNoiseAdaptive { alpha, l0 } = cfg.mode else {
        return Err(OptError::InvalidConfig(
            "run_gd_rel_adaptive needs SmoothMode::RelNoiseAdaptive".into(),
        ));
    };
    x0.check_dim(oracle.dim())?;
    let one = F::one();
    let two = F::lit(2.0);
    let step_factor = (one - two * alpha) / (one - alpha);
    let slack_coef = alpha / (one - alpha);
    let ulp = F::lit(8.0) * F::epsilon();
    let mut x = x0.clone();
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut l_cur = l0;
    let mut l_history = Vec::new();
    let mut doublings = 0;
    let mut f = oracle.value(&x);
    let mut k = 0;
    let status = loop {
        if !f.is_finite() {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::Diverged;
        }
        if cfg.control.would_exceed(oracle, 2) {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::BudgetExhausted;
        }
        let g = oracle.grad(&x)?;
        let gn = g.norm();
        if gn <= cfg.tol {
            rec.push(oracle, k, &x, f, Some(gn), F::zero());
            break Status::Converged;
        }
        if k >= cfg.n {
            rec.push(oracle, k, &x, f, Some(gn), F::zero());
            break Status::BudgetExhausted;
        }
        let mut l_try = if cfg.halving && k > 0 {
            (l_cur / two).max(F::lit(L_MIN))
        } else {
            l_cur
        };
        let mut local = 0;
        let (x_next, f_next, h) = loop {
            let h = step_factor / l_try;
            let xn = x.plus_scaled(-h, &g);
            let fn_ = oracle.value(&xn);
            let dx = &xn - &x;
            let dn = dx.norm();
            let rhs = f + g.dot(&dx) + l_try / two * dn * dn + slack_coef * gn * dn;
            if fn_ <= rhs + ulp * f.abs() {
                break (xn, fn_, h);
            }
            local += 1;
            doublings += 1;
            if local > MAX_DOUBLINGS {
                return Err(OptError::ExitCriterionUnreachable { iter: k, doublings: local });
            }
            l_try *= two;
        };
        l_cur = l_try;
        l_history.push(l_try);
        let d = rec.push(oracle, k, &x, f, Some(gn), h);
        if rec.diverged(d, f) {
            break Status::Diverged;
        }
        x = x_next;
        f = f_next;
        k += 1;
    };
    Ok(AdaptiveRun {
        outcome: Outcome {
            x,
            trace: rec.finish(status),
        },
        l_history,
        doublings,
    })
}

/// Dispatches on `cfg.mode`.
pub fn run_smooth<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &SmoothConfig<F>,
) -> Result<Outcome<F>> {
    match cfg.mode {
        SmoothMode::Exact => run_gd(oracle, x0, cfg),
        SmoothMode::AbsNoise { .. } => run_gd_abs(oracle, x0, cfg),
        SmoothMode::RelNoise { .. } => run_gd_rel(oracle, x0, cfg),
        SmoothMode::RelNoiseAdaptive { .. } => run_gd_rel_adaptive(oracle, x0, cfg).map(|r| r.outcome),
    }
}
