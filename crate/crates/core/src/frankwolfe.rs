//! Conditional gradient (Frank–Wolfe) with the classic `2/(k+1)` step or the
//! short step `min{−⟨∇f(x^k), y^k−x^k⟩/(L||y^k−x^k||²), 1}`.
//!
//! Iterations are numbered from 1 (`x¹ = x0`); after `N−1` steps the reported
//! point is `x^N`, matching the bound `f(x^N) − f* ≤ 2LR²/(N+2)`.

use crate::error::{OptError, Result};
use crate::oracle::OracleSuite;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;
use crate::trace::{Outcome, Recorder, RunControl, Status};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FwStep<F> {
    Classic,
    ShortStep { l: F },
}

#[derive(Clone, Debug)]
pub struct FwConfig<F> {
    pub step_rule: FwStep<F>,
    /// Index `N` of the last iterate.
    pub n: usize,
    /// Stop once the FW gap is `≤ tol`; `0` disables the check.
    pub tol: F,
    pub control: RunControl<F>,
}

impl<F: Scalar> FwConfig<F> {
    pub fn new(step_rule: FwStep<F>, n: usize) -> Self {
        Self {
            step_rule,
            n,
            tol: F::zero(),
            control: RunControl::default(),
        }
    }

    pub fn with_tol(mut self, tol: F) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_control(mut self, control: RunControl<F>) -> Self {
        self.control = control;
        self
    }
}

#[derive(Clone, Debug)]
pub struct FwRun<F> {
    pub outcome: Outcome<F>,
    /// Step `γ_k` per iteration.
    pub gammas: Vec<F>,
    /// FW gap `⟨∇f(x^k), x^k − y^k⟩` at every iterate including the last.
    pub fw_gaps: Vec<F>,
    /// `||y^k − x^k||` per iteration.
    pub step_lengths: Vec<F>,
}

/// `2LR²/(N+2)`
pub fn classic_bound<F: Scalar>(l: F, r: F, n: usize) -> F {
    F::lit(2.0) * l * r * r / F::from_usize_lossy(n + 2)
}

/// `⟨∇f(x), x − lmo(∇f(x))⟩` from the exact gradient (uncounted).
pub fn fw_gap<F: Scalar>(oracle: &OracleSuite<F>, set: &FeasibleSet<F>, x: &Vector<F>) -> Result<F> {
    x.check_dim(set.dim())?;
    let g = oracle.true_grad(x).ok_or(OptError::MissingOracle("a gradient"))?;
    let y = set.lmo(&g)?;
    Ok(g.dot(&(x - &y)))
}

pub fn run_fw<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    set: &FeasibleSet<F>,
    x0: &Vector<F>,
    cfg: &FwConfig<F>,
) -> Result<FwRun<F>> {
    if !set.is_bounded() {
        return Err(OptError::UnboundedSet("Frank–Wolfe needs a bounded set"));
    }
    if let FwStep::ShortStep { l } = cfg.step_rule {
        if !(l > F::zero()) || !l.is_finite() {
            return Err(OptError::InvalidConfig(format!("short step needs L > 0, got {l}")));
        }
    }
    if cfg.n == 0 {
        return Err(OptError::InvalidConfig("N must be ≥ 1".into()));
    }
    x0.check_dim(oracle.dim())?;
    let res = set.residual(x0)?;
    if res > F::lit(1e-10) * (F::one() + x0.norm()) {
        return Err(OptError::InfeasibleStart(res.as_f64()));
    }
    let mut x = x0.clone();
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut gammas = Vec::new();
    let mut fw_gaps = Vec::new();
    let mut step_lengths = Vec::new();
    let mut k = 1;
    let status = loop {
        let f = oracle.value(&x);
        if cfg.control.would_exceed(oracle, 2) {
            rec.push(oracle, k, &x, f, None, F::zero());
            break Status::BudgetExhausted;
        }
        let g = oracle.grad(&x)?;
        let y = set.lmo(&g)?;
        let dir = &y - &x;
        let gap = -g.dot(&dir);
        fw_gaps.push(gap);
        if cfg.tol > F::zero() && gap <= cfg.tol {
            rec.push(oracle, k, &x, f, Some(g.norm()), F::zero());
            break Status::Converged;
        }
        if k >= cfg.n {
            rec.push(oracle, k, &x, f, Some(g.norm()), F::zero());
            break Status::BudgetExhausted;
        }
        let dn2 = dir.norm_sq();
        let gamma = match cfg.step_rule {
            FwStep::Classic => F::lit(2.0) / F::from_usize_lossy(k + 1),
            FwStep::ShortStep { l } => {
                if dn2 == F::zero() {
                    F::zero()
                } else {
                    (gap / (l * dn2)).min(F::one()).max(F::zero())
                }
            }
        };
        debug_assert!(gamma >= F::zero() && gamma <= F::one());
        gammas.push(gamma);
        step_lengths.push(dn2.sqrt());
        rec.push(oracle, k, &x, f, Some(g.norm()), gamma);
        let mut next = x.scaled(F::one() - gamma);
        next.axpy(gamma, &y);
        x = next;
        k += 1;
    };
    Ok(FwRun {
        outcome: Outcome {
            x,
            trace: rec.finish(status),
        },
        gammas,
        fw_gaps,
        step_lengths,
    })
}
