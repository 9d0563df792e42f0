//! Experiment documents (JSON).
//!
//! ```json
//! {
//!   "problem": {"name": "quad_diag", "params": {"lambdas": [10, 1]}, "seed": 3},
//!   "noise": {"kind": "relative_grad", "alpha": 0.25, "mode": "shrink"},
//!   "method": {"name": "gd_rel", "params": {"alpha": 0.25}},
//!   "budget": {"iterations": 200, "max_oracle_calls": 1000},
//!   "output": {"trace_path": "out/gd.csv", "record_every": 1, "record_x": false}
//! }
//! ```
//!
//! `problem` and `method` may also be bare names, and a top-level `iterations`
//! replaces `budget.iterations`. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use optlab::momentum::Variant;
use optlab::noise::{AbsMode, NoiseSpec, RelMode, StochDist, ZoBoundedMode};
use optlab::{ParamValue, Params, Vector64, CATALOG};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{BenchError, Result};
use crate::traceio::TraceFormat;

/// Method names accepted in `method.name`, with their parameters.
pub const METHODS: &[(&str, &str)] = &[
    ("polyak_subgrad", "projected subgradient, Polyak step; params fstar, tol"),
    ("const_subgrad", "projected subgradient, fixed h or R/(M sqrt N); params h, m, r, averaging"),
    ("switching", "switching subgradient scheme for g(x) <= 0; params delta, theta0, mg"),
    ("restarted_switching", "switching scheme with restarts; params eps, alpha, theta0, mg"),
    ("gd", "gradient descent, step 1/L; params l, tol"),
    ("gd_abs", "GD on absolutely inexact gradients with early stop; params l, delta, c, tol"),
    ("gd_rel", "GD on relatively inexact gradients; params l, alpha, tol"),
    ("gd_rel_adaptive", "adaptive-L GD on relatively inexact gradients; params l, alpha, l0, halving, tol"),
    ("heavy_ball", "Polyak heavy ball; params l, mu, tol"),
    ("chebyshev", "Chebyshev semi-iterative recurrence; params l, mu, tol"),
    ("nesterov_sc", "Nesterov, strongly convex momentum; params l, mu, tol"),
    ("nesterov_cvx", "Nesterov, (k-1)/(k+2) momentum; params l, tol"),
    ("taylor_drori", "Taylor-Drori optimal method; params l, mu, tol"),
    ("cg_quadratic", "two-parameter conjugate gradients on quadratics; params tol"),
    ("frank_wolfe", "conditional gradient; params step (classic|short_step), l, tol"),
    ("sgd", "projected SGD; params step, batch, clip, averaging"),
    ("zo_sgd", "kernel zeroth-order projected SGD; params tau, tau_exponent, step, batch, beta"),
];

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub name: String,
    pub params: Params,
    pub seed: u64,
    pub x0: Option<Vec<f64>>,
}

impl ProblemSpec {
    pub fn x0(&self) -> Option<Vector64> {
        self.x0.as_deref().map(Vector64::from_f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    pub iterations: usize,
    pub max_oracle_calls: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub trace_path: Option<PathBuf>,
    pub record_every: usize,
    pub record_x: bool,
    /// Taken from the path extension when absent.
    pub format: Option<TraceFormat>,
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub noise: NoiseSpec<f64>,
    pub method: MethodSpec,
    pub budget: Budget,
    pub output: OutputSpec,
}

// ---- method parameters ----

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyakParams {
    pub fstar: Option<f64>,
    pub tol: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstSubgradParams {
    pub h: Option<f64>,
    pub m: Option<f64>,
    pub r: Option<f64>,
    #[serde(default = "yes")]
    pub averaging: bool,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchingParams {
    pub delta: f64,
    pub theta0: Option<f64>,
    pub mg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestartParams {
    pub eps: f64,
    pub alpha: Option<f64>,
    pub theta0: Option<f64>,
    pub mg: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdParams {
    pub l: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdAbsParams {
    pub l: Option<f64>,
    pub delta: f64,
    pub c: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdRelParams {
    pub l: Option<f64>,
    pub alpha: f64,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveParams {
    pub l: Option<f64>,
    pub alpha: f64,
    pub l0: Option<f64>,
    pub halving: Option<bool>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumParams {
    pub l: Option<f64>,
    pub mu: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CgParams {
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FwStepCfg {
    #[default]
    Classic,
    ShortStep,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FwParams {
    #[serde(default)]
    pub step: FwStepCfg,
    pub l: Option<f64>,
    pub tol: Option<f64>,
}

fn default_eta() -> f64 {
    0.6
}

/// `{"rule": "const", "gamma": 0.1}` and friends. `budget_const` takes `N` from the budget.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepCfg {
    Const { gamma: f64 },
    BudgetConst { r: f64, m: f64 },
    InvK { mu: f64 },
    AdaGradNorm { r: f64 },
    Decay {
        gamma0: f64,
        #[serde(default = "default_eta")]
        eta: f64,
    },
}

/// `"none"`, `"uniform"` or `{"tail": q}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingCfg {
    #[default]
    None,
    Uniform,
    Tail(f64),
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgdParams {
    pub step: StepCfg,
    #[serde(default = "one")]
    pub batch: usize,
    pub clip: Option<f64>,
    #[serde(default)]
    pub averaging: AveragingCfg,
}

fn two() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoParams {
    pub tau: f64,
    /// `τ_k = τ(k+1)^{−tau_exponent}` when set.
    pub tau_exponent: Option<f64>,
    pub step: StepCfg,
    #[serde(default = "one")]
    pub batch: usize,
    #[serde(default = "two")]
    pub beta: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MethodSpec {
    PolyakSubgrad(PolyakParams),
    ConstSubgrad(ConstSubgradParams),
    Switching(SwitchingParams),
    RestartedSwitching(RestartParams),
    Gd(GdParams),
    GdAbs(GdAbsParams),
    GdRel(GdRelParams),
    GdRelAdaptive(AdaptiveParams),
    Momentum(Variant, MomentumParams),
    CgQuadratic(CgParams),
    FrankWolfe(FwParams),
    Sgd(SgdParams),
    ZoSgd(ZoParams),
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::PolyakSubgrad(_) => "polyak_subgrad",
            MethodSpec::ConstSubgrad(_) => "const_subgrad",
            MethodSpec::Switching(_) => "switching",
            MethodSpec::RestartedSwitching(_) => "restarted_switching",
            MethodSpec::Gd(_) => "gd",
            MethodSpec::GdAbs(_) => "gd_abs",
            MethodSpec::GdRel(_) => "gd_rel",
            MethodSpec::GdRelAdaptive(_) => "gd_rel_adaptive",
            MethodSpec::Momentum(Variant::HeavyBall, _) => "heavy_ball",
            MethodSpec::Momentum(Variant::Chebyshev, _) => "chebyshev",
            MethodSpec::Momentum(Variant::NesterovSC, _) => "nesterov_sc",
            MethodSpec::Momentum(Variant::NesterovCvx, _) => "nesterov_cvx",
            MethodSpec::Momentum(Variant::TaylorDrori, _) => "taylor_drori",
            MethodSpec::CgQuadratic(_) => "cg_quadratic",
            MethodSpec::FrankWolfe(_) => "frank_wolfe",
            MethodSpec::Sgd(_) => "sgd",
            MethodSpec::ZoSgd(_) => "zo_sgd",
        }
    }

    fn parse(name: &str, params: Value) -> Result<Self> {
        let params = if params.is_null() {
            Value::Object(Default::default())
        } else {
            params
        };
        fn p<T: DeserializeOwned>(method: &str, v: Value) -> Result<T> {
            serde_json::from_value(v)
                .map_err(|e| BenchError::Config(format!("method `{method}` params: {e}")))
        }
        let m = match name {
            "polyak_subgrad" => MethodSpec::PolyakSubgrad(p(name, params)?),
            "const_subgrad" => MethodSpec::ConstSubgrad(p(name, params)?),
            "switching" => MethodSpec::Switching(p(name, params)?),
            "restarted_switching" => MethodSpec::RestartedSwitching(p(name, params)?),
            "gd" => MethodSpec::Gd(p(name, params)?),
            "gd_abs" => MethodSpec::GdAbs(p(name, params)?),
            "gd_rel" => MethodSpec::GdRel(p(name, params)?),
            "gd_rel_adaptive" => MethodSpec::GdRelAdaptive(p(name, params)?),
            "heavy_ball" => MethodSpec::Momentum(Variant::HeavyBall, p(name, params)?),
            "chebyshev" => MethodSpec::Momentum(Variant::Chebyshev, p(name, params)?),
            "nesterov_sc" => MethodSpec::Momentum(Variant::NesterovSC, p(name, params)?),
            "nesterov_cvx" => MethodSpec::Momentum(Variant::NesterovCvx, p(name, params)?),
            "taylor_drori" => MethodSpec::Momentum(Variant::TaylorDrori, p(name, params)?),
            "cg_quadratic" => MethodSpec::CgQuadratic(p(name, params)?),
            "frank_wolfe" => MethodSpec::FrankWolfe(p(name, params)?),
            "sgd" => MethodSpec::Sgd(p(name, params)?),
            "zo_sgd" => MethodSpec::ZoSgd(p(name, params)?),
            other => {
                let names: Vec<&str> = METHODS.iter().map(|(n, _)| *n).collect();
                return Err(BenchError::Config(format!(
                    "unknown method `{other}`; available methods: {}",
                    names.join(", ")
                )));
            }
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(format!("method `{}`: {m}", self.name())));
        match self {
            MethodSpec::GdRel(p) if !(0.0..1.0).contains(&p.alpha) => {
                bad(format!("alpha must satisfy 0 <= alpha < 1, got {}", p.alpha))
            }
            MethodSpec::GdRelAdaptive(p) if !(0.0..0.5).contains(&p.alpha) => bad(format!(
                "alpha must satisfy 0 <= alpha < 0.5 (the step factor (1-2alpha)/(1-alpha) must be positive), got {}",
                p.alpha
            )),
            MethodSpec::GdAbs(p) if !(p.delta >= 0.0) => bad(format!("delta must be >= 0, got {}", p.delta)),
            MethodSpec::Sgd(p) if p.batch == 0 => bad("batch must be >= 1".into()),
            MethodSpec::ZoSgd(p) if p.batch == 0 => bad("batch must be >= 1".into()),
            MethodSpec::ZoSgd(p) if !(p.tau > 0.0) => bad(format!("tau must be > 0, got {}", p.tau)),
            _ => Ok(()),
        }
    }
}

// ---- noise ----

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelModeCfg {
    #[default]
    Shrink,
    Grow,
    RandomDirection,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistCfg {
    #[default]
    Gaussian,
    StudentT3,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoModeCfg {
    #[default]
    DeterministicWorst,
    Random,
}

/// `{"kind": "absolute_grad", "delta": 0.1, "fixed": [0, 0, 0.1]}`; omit `fixed` for
/// random directions.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseCfg {
    None,
    AbsoluteGrad {
        delta: f64,
        fixed: Option<Vec<f64>>,
    },
    RelativeGrad {
        alpha: f64,
        #[serde(default)]
        mode: RelModeCfg,
    },
    AdditiveStochGrad {
        sigma: f64,
        #[serde(default)]
        dist: DistCfg,
    },
    ZoBoundedValue {
        delta: f64,
        #[serde(default)]
        mode: ZoModeCfg,
    },
    ZoStochValue {
        delta_tilde: f64,
    },
}

impl NoiseCfg {
    pub fn to_spec(&self) -> NoiseSpec<f64> {
        match self {
            NoiseCfg::None => NoiseSpec::None,
            NoiseCfg::AbsoluteGrad { delta, fixed } => NoiseSpec::AbsoluteGrad {
                delta: *delta,
                mode: match fixed {
                    Some(v) => AbsMode::Fixed(Vector64::from_f64(v)),
                    None => AbsMode::RandomDirection,
                },
            },
            NoiseCfg::RelativeGrad { alpha, mode } => NoiseSpec::RelativeGrad {
                alpha: *alpha,
                mode: match mode {
                    RelModeCfg::Shrink => RelMode::Shrink,
                    RelModeCfg::Grow => RelMode::Grow,
                    RelModeCfg::RandomDirection => RelMode::RandomDirection,
                },
            },
            NoiseCfg::AdditiveStochGrad { sigma, dist } => NoiseSpec::AdditiveStochGrad {
                sigma: *sigma,
                dist: match dist {
                    DistCfg::Gaussian => StochDist::Gaussian,
                    DistCfg::StudentT3 => StochDist::StudentT3,
                },
            },
            NoiseCfg::ZoBoundedValue { delta, mode } => NoiseSpec::ZoBoundedValue {
                delta: *delta,
                mode: match mode {
                    ZoModeCfg::DeterministicWorst => ZoBoundedMode::DeterministicWorst,
                    ZoModeCfg::Random => ZoBoundedMode::Random,
                },
            },
            NoiseCfg::ZoStochValue { delta_tilde } => NoiseSpec::ZoStochValue {
                delta_tilde: *delta_tilde,
            },
        }
    }
}

// ---- raw document ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    problem: Value,
    noise: Option<NoiseCfg>,
    method: Value,
    iterations: Option<usize>,
    budget: Option<RawBudget>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: String,
    #[serde(default)]
    params: serde_json::Map<String, Value>,
    #[serde(default)]
    seed: u64,
    x0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMethod {
    name: String,
    #[serde(default)]
    params: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    iterations: Option<usize>,
    max_oracle_calls: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    trace_path: Option<PathBuf>,
    record_every: Option<usize>,
    #[serde(default)]
    record_x: bool,
    format: Option<TraceFormat>,
}

/// Rows kept in a trace stay below this by default.
pub const MAX_DEFAULT_ROWS: usize = 100_000;

/// Smallest stride whose grid `0, e, 2e, ..` plus the final row has fewer than
/// [`MAX_DEFAULT_ROWS`] rows.
pub fn default_record_every(iterations: usize) -> usize {
    iterations.div_ceil(MAX_DEFAULT_ROWS - 3).max(1)
}

fn to_param(key: &str, v: &Value) -> Result<ParamValue> {
    let err = || BenchError::Config(format!("problem param `{key}`: unsupported value {v}"));
    Ok(match v {
        Value::Number(n) => ParamValue::Num(n.as_f64().ok_or_else(err)?),
        Value::Bool(b) => ParamValue::Bool(*b),
        Value::String(s) => ParamValue::Text(s.clone()),
        Value::Array(items) => ParamValue::List(
            items
                .iter()
                .map(|i| i.as_f64().ok_or_else(err))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => return Err(err()),
    })
}

fn parse_problem(v: Value) -> Result<ProblemSpec> {
    let raw = match v {
        Value::String(name) => RawProblem {
            name,
            params: Default::default(),
            seed: 0,
            x0: None,
        },
        obj @ Value::Object(_) => {
            serde_json::from_value(obj).map_err(|e| BenchError::Config(format!("problem: {e}")))?
        }
        other => {
            return Err(BenchError::Config(format!(
                "problem must be a name or an object, got {other}"
            )))
        }
    };
    if !CATALOG.iter().any(|(n, _)| *n == raw.name) {
        let names: Vec<&str> = CATALOG.iter().map(|(n, _)| *n).collect();
        return Err(BenchError::Config(format!(
            "unknown problem `{}`; available problems: {}",
            raw.name,
            names.join(", ")
        )));
    }
    let mut params = Params::new();
    for (k, v) in &raw.params {
        params.insert(k, to_param(k, v)?);
    }
    Ok(ProblemSpec {
        name: raw.name,
        params,
        seed: raw.seed,
        x0: raw.x0,
    })
}

fn parse_method(v: Value) -> Result<MethodSpec> {
    match v {
        Value::String(name) => MethodSpec::parse(&name, Value::Null),
        obj @ Value::Object(_) => {
            let raw: RawMethod =
                serde_json::from_value(obj).map_err(|e| BenchError::Config(format!("method: {e}")))?;
            MethodSpec::parse(&raw.name, raw.params)
        }
        other => Err(BenchError::Config(format!(
            "method must be a name or an object, got {other}"
        ))),
    }
}

/// Parses and validates an experiment document, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    // serde_json errors carry "at line L column C"
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
    let problem = parse_problem(raw.problem)?;
    let method = parse_method(raw.method)?;
    let (b_iter, max_calls) = match raw.budget {
        Some(b) => (b.iterations, b.max_oracle_calls),
        None => (None, None),
    };
    let iterations = match (raw.iterations, b_iter) {
        (Some(a), Some(b)) if a != b => {
            return Err(BenchError::Config(format!(
                "`iterations` ({a}) and `budget.iterations` ({b}) disagree"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => {
            return Err(BenchError::Config(
                "missing required field `iterations` (top level or in `budget`)".into(),
            ))
        }
    };
    let output = match raw.output {
        Some(o) => {
            if o.record_every == Some(0) {
                return Err(BenchError::Config("output.record_every must be >= 1".into()));
            }
            OutputSpec {
                trace_path: o.trace_path,
                record_every: o.record_every.unwrap_or_else(|| default_record_every(iterations)),
                record_x: o.record_x,
                format: o.format,
            }
        }
        None => OutputSpec {
            trace_path: None,
            record_every: default_record_every(iterations),
            record_x: false,
            format: None,
        },
    };
    let noise = raw.noise.as_ref().map(NoiseCfg::to_spec).unwrap_or_default();
    Ok(ExperimentSpec {
        problem,
        noise,
        method,
        budget: Budget {
            iterations,
            max_oracle_calls: max_calls,
        },
        output,
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Replaces the problem seed with `OPT_SEED` when that variable is set.
pub fn apply_seed_env(spec: &mut ExperimentSpec) -> Result<()> {
    if let Ok(v) = std::env::var("OPT_SEED") {
        spec.problem.seed = v
            .trim()
            .parse()
            .map_err(|_| BenchError::Config(format!("OPT_SEED must be an unsigned integer, got `{v}`")))?;
    }
    Ok(())
}
