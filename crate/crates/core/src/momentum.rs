//! Momentum and accelerated methods: heavy ball, Chebyshev iteration,
//! Nesterov (strongly convex and convex), Taylor–Drori, and two-parameter
//! conjugate gradients on quadratics.
//!
//! Two-point recurrences take a plain gradient step first (`x^{−1} = x⁰`).
//! Objective values may increase along the way; only the distance monitor
//! flags divergence.

use crate::error::{OptError, Result};
use crate::oracle::OracleSuite;
use crate::scalar::Scalar;
use crate::trace::{Outcome, Recorder, RunControl, Status, Trace};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    HeavyBall,
    Chebyshev,
    NesterovSC,
    NesterovCvx,
    TaylorDrori,
}

impl Variant {
    pub fn needs_mu(&self) -> bool {
        matches!(self, Variant::HeavyBall | Variant::Chebyshev | Variant::NesterovSC)
    }
}

#[derive(Clone, Debug)]
pub struct MomentumConfig<F> {
    pub variant: Variant,
    pub l: F,
    pub mu: F,
    pub n: usize,
    /// Converged once `||∇f|| ≤ tol` at the evaluated point.
    pub tol: F,
    pub control: RunControl<F>,
}

impl<F: Scalar> MomentumConfig<F> {
    pub fn new(variant: Variant, l: F, mu: F, n: usize) -> Self {
        Self {
            variant,
            l,
            mu,
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

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(OptError::InvalidConfig(m));
        if !(self.l > F::zero()) || !self.l.is_finite() {
            return bad(format!("L must be > 0, got {}", self.l));
        }
        if !(self.mu >= F::zero()) || self.mu > self.l {
            return bad(format!("need 0 ≤ mu ≤ L, got mu={}", self.mu));
        }
        if self.variant.needs_mu() && self.mu == F::zero() {
            return bad(format!("{:?} needs mu > 0", self.variant));
        }
        if matches!(self.variant, Variant::Chebyshev | Variant::TaylorDrori) && self.mu >= self.l {
            return bad(format!("{:?} needs mu < L", self.variant));
        }
        Ok(())
    }
}

/// Heavy-ball `(step, momentum)`: `4/(√L+√μ)²` and `((√L−√μ)/(√L+√μ))²`.
pub fn heavy_ball_coefficients<F: Scalar>(l: F, mu: F) -> (F, F) {
    let (sl, sm) = (l.sqrt(), mu.sqrt());
    let s = sl + sm;
    let r = (sl - sm) / s;
    (F::lit(4.0) / (s * s), r * r)
}

/// `δ₁ = 1/(2c+1)`, `δ_{k+1} = 1/(2c − δ_k)` with `c = (L+μ)/(L−μ)`; returns `δ₁..δ_n`.
pub fn chebyshev_deltas<F: Scalar>(l: F, mu: F, n: usize) -> Vec<F> {
    let c = (l + mu) / (l - mu);
    let two = F::lit(2.0);
    let mut out = Vec::with_capacity(n);
    let mut d = F::one() / (two * c + F::one());
    for _ in 0..n {
        out.push(d);
        d = F::one() / (two * c - d);
    }
    out
}

/// Chebyshev `(step, momentum)` at a given `δ`: `4δ/(L−μ)` and `2δ(L+μ)/(L−μ) − 1`.
pub fn chebyshev_coefficients<F: Scalar>(l: F, mu: F, delta: F) -> (F, F) {
    let two = F::lit(2.0);
    (F::lit(4.0) * delta / (l - mu), two * delta * (l + mu) / (l - mu) - F::one())
}

/// `(√L−√μ)/(√L+√μ)`
pub fn chebyshev_limit<F: Scalar>(l: F, mu: F) -> F {
    (l.sqrt() - mu.sqrt()) / (l.sqrt() + mu.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TdCoefficients<F> {
    pub a_next: F,
    pub tau: F,
    pub delta: F,
}

/// One step of the Taylor–Drori parameter recurrence from `A_k`.
pub fn taylor_drori_coefficients<F: Scalar>(a: F, q: F) -> TdCoefficients<F> {
    let one = F::one();
    let two = F::lit(2.0);
    let omq = one - q;
    let a_next = ((one + q) * a + two * (one + ((one + a) * (one + q * a)).sqrt())) / (omq * omq);
    let tau = one - a / (omq * a_next);
    let delta = F::lit(0.5) * (omq * omq * a_next - (one + q) * a) / (one + q + q * a);
    TdCoefficients { a_next, tau, delta }
}

#[derive(Clone, Debug)]
pub struct MomentumRun<F> {
    pub outcome: Outcome<F>,
    /// Taylor–Drori only: uncounted trace of the `x^k` sequence (the main trace follows `z^k`).
    pub secondary: Option<Trace<F>>,
}

/// Runs the configured variant from `x0`.
pub fn run_momentum<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &MomentumConfig<F>,
) -> Result<MomentumRun<F>> {
    cfg.validate()?;
    x0.check_dim(oracle.dim())?;
    if cfg.variant == Variant::TaylorDrori {
        return run_taylor_drori(oracle, x0, cfg);
    }
    let (l, mu) = (cfg.l, cfg.mu);
    let inv_l = F::one() / l;
    let (hb_step, hb_mom) = heavy_ball_coefficients(l, mu);
    let beta_sc = chebyshev_limit(l, mu);
    let deltas = if cfg.variant == Variant::Chebyshev {
        chebyshev_deltas(l, mu, cfg.n.max(1))
    } else {
        Vec::new()
    };
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
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
        let mom = &x - &x_prev;
        // (gradient point, step, momentum coefficient)
        let (point, step, beta) = match cfg.variant {
            Variant::HeavyBall => (None, hb_step, hb_mom),
            Variant::Chebyshev => {
                if k == 0 {
                    (None, F::lit(2.0) / (l + mu), F::zero())
                } else {
                    let (s, b) = chebyshev_coefficients(l, mu, deltas[(k - 1).min(deltas.len() - 1)]);
                    (None, s, b)
                }
            }
            Variant::NesterovSC => (Some(beta_sc), inv_l, beta_sc),
            Variant::NesterovCvx => {
                let b = if k == 0 {
                    F::zero()
                } else {
                    F::from_usize_lossy(k - 1) / F::from_usize_lossy(k + 2)
                };
                (Some(b), inv_l, b)
            }
            Variant::TaylorDrori => unreachable!(),
        };
        let y = match point {
            Some(b) => x.plus_scaled(b, &mom),
            None => x.clone(),
        };
        let g = oracle.grad(&y)?;
        let gn = g.norm();
        if gn <= cfg.tol {
            rec.push(oracle, k, &x, f, Some(gn), F::zero());
            if y != x {
                // The extrapolated point is stationary: report it.
                x = y;
                k += 1;
                let f = oracle.value(&x);
                rec.push(oracle, k, &x, f, Some(gn), F::zero());
            }
            break Status::Converged;
        }
        if k >= cfg.n {
            rec.push(oracle, k, &x, f, Some(gn), F::zero());
            break Status::BudgetExhausted;
        }
        let d = rec.push(oracle, k, &x, f, Some(gn), step);
        if rec.diverged(d, f) {
            break Status::Diverged;
        }
        // For Nesterov variants `y` already carries the momentum term.
        let mut next = y.plus_scaled(-step, &g);
        if point.is_none() {
            next.axpy(beta, &mom);
        }
        x_prev = std::mem::replace(&mut x, next);
        k += 1;
    };
    Ok(MomentumRun {
        outcome: Outcome {
            x,
            trace: rec.finish(status),
        },
        secondary: None,
    })
}

fn run_taylor_drori<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &MomentumConfig<F>,
) -> Result<MomentumRun<F>> {
    let q = cfg.mu / cfg.l;
    let inv_l = F::one() / cfg.l;
    let mut x = x0.clone();
    let mut z = x0.clone();
    let mut a = F::zero();
    let mut rec = Recorder::new(&z, &cfg.control);
    let mut sec = Recorder::new(&x, &cfg.control);
    let mut k = 0;
    let status = loop {
        let f = oracle.value(&z);
        if !f.is_finite() {
            rec.push(oracle, k, &z, f, None, F::zero());
            break Status::Diverged;
        }
        if k >= cfg.n || cfg.control.would_exceed(oracle, 2) {
            rec.push(oracle, k, &z, f, None, F::zero());
            sec.push(oracle, k, &x, oracle.true_value(&x), None, F::zero());
            break Status::BudgetExhausted;
        }
        let c = taylor_drori_coefficients(a, q);
        let y = x.plus_scaled(c.tau, &(&z - &x));
        let g = oracle.grad(&y)?;
        let gn = g.norm();
        let d = rec.push(oracle, k, &z, f, Some(gn), c.delta * inv_l);
        sec.push(oracle, k, &x, oracle.true_value(&x), Some(gn), inv_l);
        if gn <= cfg.tol {
            x = y.clone();
            z = y;
            k += 1;
            let f = oracle.value(&z);
            rec.push(oracle, k, &z, f, Some(gn), F::zero());
            sec.push(oracle, k, &x, f, Some(gn), F::zero());
            break Status::Converged;
        }
        if rec.diverged(d, f) {
            break Status::Diverged;
        }
        x = y.plus_scaled(-inv_l, &g);
        let qd = q * c.delta;
        let mut zn = z.scaled(F::one() - qd);
        zn.axpy(qd, &y);
        zn.axpy(-c.delta * inv_l, &g);
        z = zn;
        a = c.a_next;
        k += 1;
    };
    Ok(MomentumRun {
        outcome: Outcome {
            x: z,
            trace: rec.finish(status),
        },
        secondary: Some(sec.finish(status)),
    })
}

#[derive(Clone, Debug)]
pub struct CgConfig<F> {
    pub n: usize,
    /// Converged once `||∇f|| ≤ tol`.
    pub tol: F,
    pub control: RunControl<F>,
}

impl<F: Scalar> CgConfig<F> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            tol: F::lit(1e-12),
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

/// Conjugate gradients as exact minimization over `x^k − α∇f(x^k) + β(x^k − x^{k−1})`.
///
/// The `2×2` system is solved in closed form; when it is singular (always on the
/// first step, where `x^k − x^{k−1} = 0`) the step falls back to exact line
/// search along `−∇f`.
pub fn run_cg_quadratic<F: Scalar>(
    oracle: &mut OracleSuite<F>,
    x0: &Vector<F>,
    cfg: &CgConfig<F>,
) -> Result<Outcome<F>> {
    let quad = oracle
        .quadratic()
        .cloned()
        .ok_or_else(|| OptError::UnsupportedProblem(format!("`{}` is not a quadratic", oracle.name())))?;
    x0.check_dim(oracle.dim())?;
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    let mut rec = Recorder::new(&x, &cfg.control);
    let mut k = 0;
    let status = loop {
        let f = oracle.value(&x);
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
        let v = &x - &x_prev;
        let ag = quad.a.matvec(&g);
        let av = quad.a.matvec(&v);
        let (guu, guv, gvv) = (g.dot(&ag), g.dot(&av), v.dot(&av));
        let gg = g.norm_sq();
        let gv = g.dot(&v);
        let det = guu * gvv - guv * guv;
        // Minimize over x − a·g + b·v: [guu −guv; −guv gvv][a; b] = [gg; −gv].
        let (a, b) = if det > F::lit(1e-14) * guu * gvv && gvv > F::zero() {
            let a = (gg * gvv - guv * gv) / det;
            let b = (-gv * guu + guv * gg) / det;
            (a, b)
        } else if guu > F::zero() {
            (gg / guu, F::zero())
        } else {
            return Err(OptError::UnsupportedProblem(
                "quadratic form is not positive along the gradient".into(),
            ));
        };
        let d = rec.push(oracle, k, &x, f, Some(gn), a);
        if rec.diverged(d, f) {
            break Status::Diverged;
        }
        let mut next = x.plus_scaled(-a, &g);
        next.axpy(b, &v);
        x_prev = std::mem::replace(&mut x, next);
        k += 1;
    };
    Ok(Outcome {
        x,
        trace: rec.finish(status),
    })
}
