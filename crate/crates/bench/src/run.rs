//! Builds the problem and method from an [`ExperimentSpec`] and runs it.

use std::time::Instant;

use optlab::frankwolfe::{run_fw, FwConfig, FwStep};
use optlab::momentum::{run_cg_quadratic, run_momentum, CgConfig, MomentumConfig, Variant};
use optlab::smooth::{run_gd_abs, run_gd_rel, run_gd_rel_adaptive, run_gd, SmoothConfig, SmoothMode};
use optlab::stochastic::{run_sgd, Averaging, SgdConfig, SgdStep};
use optlab::subgrad::{
    run_const_subgrad, run_polyak_subgrad, run_restarted_switching, run_switching, StepRule,
    SubgradConfig, SwitchingConfig,
};
use optlab::zeroorder::{build_kernel, run_zo_sgd, TauSchedule, ZoConfig};
use optlab::{make_problem, CallCounts, FeasibleSet, OptError, Oracle64, Rng, RunControl, Set64, Status, Trace64, Vector64};
use serde::Serialize;

use crate::config::{AveragingCfg, ExperimentSpec, FwStepCfg, MethodSpec, StepCfg};
use crate::error::{BenchError, Result};
use crate::traceio::write_trace;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub method: String,
    pub final_gap: Option<f64>,
    pub final_dist: Option<f64>,
    pub oracle_calls: u64,
    pub iterations: usize,
    pub status: String,
    /// Seconds.
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub trace: Trace64,
    /// The point the method reports (an average or best iterate where applicable).
    pub x: Vector64,
    /// Per-kind oracle counts; `summary.oracle_calls` is their total.
    pub calls: CallCounts,
    pub summary: Summary,
}

/// Runs the experiment and writes its trace if `output.trace_path` is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunResult> {
    let p = &spec.problem;
    let (oracle, set) = make_problem::<f64>(&p.name, &p.params, p.seed)?;
    let mut oracle = if spec.noise.is_none() {
        oracle
    } else {
        oracle.with_noise(spec.noise.clone(), Rng::new(p.seed).split(1))?
    };
    let x0 = p.x0().unwrap_or_else(|| oracle.default_start());
    x0.check_dim(oracle.dim())?;

    let mut control = RunControl::default()
        .with_record_every(spec.output.record_every)
        .with_record_x(spec.output.record_x);
    control.max_oracle_calls = spec.budget.max_oracle_calls;

    log::info!(
        "running {} on {} (N = {}, seed {})",
        spec.method.name(),
        p.name,
        spec.budget.iterations,
        p.seed
    );
    let start = Instant::now();
    let (x, trace) = dispatch(spec, &mut oracle, &set, &x0, control).map_err(|source| {
        BenchError::Method {
            context: format!("{} on {}", spec.method.name(), p.name),
            source,
        }
    })?;
    let wall_time = start.elapsed().as_secs_f64();

    let summary = Summary {
        problem: p.name.clone(),
        method: spec.method.name().to_string(),
        final_gap: trace.final_gap(),
        final_dist: trace.final_dist(),
        oracle_calls: oracle.total_calls(),
        iterations: trace.iterations(),
        status: trace.status.as_str().to_string(),
        wall_time,
    };
    if let Some(path) = &spec.output.trace_path {
        write_trace(&trace, path, spec.output.format)?;
    }
    Ok(RunResult {
        trace,
        x,
        calls: oracle.calls(),
        summary,
    })
}

fn need(v: Option<f64>, name: &'static str) -> optlab::Result<f64> {
    v.ok_or(OptError::MissingConstant(name))
}

/// `||x⁰ − x*||/√2`, the smallest `θ₀` the switching guarantee allows.
fn default_theta0(oracle: &Oracle64, x0: &Vector64) -> optlab::Result<f64> {
    let d = oracle.dist_to_opt(x0).ok_or(OptError::MissingConstant("theta0"))?;
    Ok(if d > 0.0 { d / std::f64::consts::SQRT_2 } else { 1.0 })
}

fn unconstrained(set: &Set64, method: &str) -> optlab::Result<()> {
    match set {
        FeasibleSet::FullSpace(_) => Ok(()),
        _ => Err(OptError::UnsupportedProblem(format!(
            "`{method}` is unconstrained but the problem has a feasible set"
        ))),
    }
}

fn sgd_step(s: StepCfg, n: usize) -> SgdStep<f64> {
    match s {
        StepCfg::Const { gamma } => SgdStep::Const { gamma },
        StepCfg::BudgetConst { r, m } => SgdStep::BudgetConst { r, m, n },
        StepCfg::InvK { mu } => SgdStep::InvK { mu },
        StepCfg::AdaGradNorm { r } => SgdStep::AdaGradNorm { r },
        StepCfg::Decay { gamma0, eta } => SgdStep::Decay { gamma0, eta },
    }
}

fn dispatch(
    spec: &ExperimentSpec,
    oracle: &mut Oracle64,
    set: &Set64,
    x0: &Vector64,
    control: RunControl<f64>,
) -> optlab::Result<(Vector64, Trace64)> {
    let n = spec.budget.iterations;
    let consts = oracle.constants.clone();
    let pair = |o: optlab::Outcome<f64>| (o.x, o.trace);
    Ok(match &spec.method {
        MethodSpec::PolyakSubgrad(p) => {
            let fstar = need(p.fstar.or(oracle.fstar), "fstar")?;
            let cfg = SubgradConfig::new(StepRule::Polyak { fstar }, n)
                .with_tol(p.tol.unwrap_or(0.0))
                .with_control(control);
            pair(run_polyak_subgrad(oracle, set, x0, &cfg)?)
        }
        MethodSpec::ConstSubgrad(p) => {
            let rule = match p.h {
                Some(h) => StepRule::Fixed { h },
                None => {
                    let m = need(p.m.or(consts.m), "M")?;
                    let r = match p.r {
                        Some(r) => r,
                        None => oracle
                            .dist_to_opt(x0)
                            .or(set.diameter())
                            .ok_or(OptError::MissingConstant("R"))?,
                    };
                    StepRule::Budget { m, r, n }
                }
            };
            let cfg = SubgradConfig::new(rule, n)
                .with_averaging(p.averaging)
                .with_control(control);
            pair(run_const_subgrad(oracle, set, x0, &cfg)?)
        }
        MethodSpec::Switching(p) => {
            let theta0 = match p.theta0 {
                Some(t) => t,
                None => default_theta0(oracle, x0)?,
            };
            let mg = need(p.mg.or(consts.mg), "Mg")?;
            let cfg = SwitchingConfig::new(p.delta, theta0, mg, n).with_control(control);
            let run = run_switching(oracle, set, x0, &cfg)?;
            (run.x_hat, run.trace)
        }
        MethodSpec::RestartedSwitching(p) => {
            let theta0 = match p.theta0 {
                Some(t) => t,
                None => default_theta0(oracle, x0)?,
            };
            let mg = need(p.mg.or(consts.mg), "Mg")?;
            let alpha = need(p.alpha.or(consts.alpha_sharp), "alpha")?;
            let cfg = SwitchingConfig::new(1.0, theta0, mg, n)
                .with_restarts(p.eps, alpha)
                .with_control(control);
            let run = run_restarted_switching(oracle, set, x0, &cfg)?;
            (run.x, run.trace)
        }
        MethodSpec::Gd(p) => {
            unconstrained(set, "gd")?;
            let mut cfg = SmoothConfig::exact(n, need(p.l.or(consts.l), "L")?).with_control(control);
            if let Some(t) = p.tol {
                cfg = cfg.with_tol(t);
            }
            pair(run_gd(oracle, x0, &cfg)?)
        }
        MethodSpec::GdAbs(p) => {
            unconstrained(set, "gd_abs")?;
            let mode = SmoothMode::AbsNoise {
                delta: p.delta,
                c: p.c.unwrap_or(2.0),
            };
            let mut cfg = SmoothConfig::new(n, need(p.l.or(consts.l), "L")?, mode).with_control(control);
            if let Some(t) = p.tol {
                cfg = cfg.with_tol(t);
            }
            pair(run_gd_abs(oracle, x0, &cfg)?)
        }
        MethodSpec::GdRel(p) => {
            unconstrained(set, "gd_rel")?;
            let mode = SmoothMode::RelNoise { alpha: p.alpha };
            let mut cfg = SmoothConfig::new(n, need(p.l.or(consts.l), "L")?, mode).with_control(control);
            if let Some(t) = p.tol {
                cfg = cfg.with_tol(t);
            }
            pair(run_gd_rel(oracle, x0, &cfg)?)
        }
        MethodSpec::GdRelAdaptive(p) => {
            unconstrained(set, "gd_rel_adaptive")?;
            let l = p.l.or(consts.l).unwrap_or(1.0);
            let mode = SmoothMode::RelNoiseAdaptive {
                alpha: p.alpha,
                l0: p.l0.unwrap_or(l),
            };
            let mut cfg = SmoothConfig::new(n, l, mode).with_control(control);
            if let Some(t) = p.tol {
                cfg = cfg.with_tol(t);
            }
            if let Some(h) = p.halving {
                cfg = cfg.with_halving(h);
            }
            pair(run_gd_rel_adaptive(oracle, x0, &cfg)?.outcome)
        }
        MethodSpec::Momentum(variant, p) => {
            unconstrained(set, spec.method.name())?;
            let l = need(p.l.or(consts.l), "L")?;
            let mu = match variant {
                Variant::NesterovCvx => p.mu.unwrap_or(0.0),
                Variant::TaylorDrori => p.mu.or(consts.mu).unwrap_or(0.0),
                _ => need(p.mu.or(consts.mu), "mu")?,
            };
            let cfg = MomentumConfig::new(*variant, l, mu, n)
                .with_tol(p.tol.unwrap_or(0.0))
                .with_control(control);
            pair(run_momentum(oracle, x0, &cfg)?.outcome)
        }
        MethodSpec::CgQuadratic(p) => {
            unconstrained(set, "cg_quadratic")?;
            let mut cfg = CgConfig::new(n).with_control(control);
            if let Some(t) = p.tol {
                cfg = cfg.with_tol(t);
            }
            pair(run_cg_quadratic(oracle, x0, &cfg)?)
        }
        MethodSpec::FrankWolfe(p) => {
            let step = match p.step {
                FwStepCfg::Classic => FwStep::Classic,
                FwStepCfg::ShortStep => FwStep::ShortStep {
                    l: need(p.l.or(consts.l), "L")?,
                },
            };
            let cfg = FwConfig::new(step, n)
                .with_tol(p.tol.unwrap_or(0.0))
                .with_control(control);
            pair(run_fw(oracle, set, x0, &cfg)?.outcome)
        }
        MethodSpec::Sgd(p) => {
            let mut cfg = SgdConfig::new(n, sgd_step(p.step, n))
                .with_batch(p.batch)
                .with_averaging(match p.averaging {
                    AveragingCfg::None => Averaging::None,
                    AveragingCfg::Uniform => Averaging::Uniform,
                    AveragingCfg::Tail(q) => Averaging::Tail(q),
                })
                .with_control(control);
            if let Some(c) = p.clip {
                cfg = cfg.with_clip(c);
            }
            pair(run_sgd(oracle, set, x0, &cfg)?.outcome)
        }
        MethodSpec::ZoSgd(p) => {
            let tau = match p.tau_exponent {
                Some(e) => TauSchedule::PowerDecay { tau0: p.tau, exponent: e },
                None => TauSchedule::Const { tau: p.tau },
            };
            let cfg = ZoConfig::new(n, tau, sgd_step(p.step, n), build_kernel(p.beta)?)
                .with_batch(p.batch)
                .with_control(control);
            let mut rng = Rng::new(spec.problem.seed).split(2);
            pair(run_zo_sgd(oracle, set, x0, &cfg, &mut rng)?.outcome)
        }
    })
}

impl RunResult {
    pub fn status(&self) -> Status {
        self.trace.status
    }
}
