//! First-order, conditional-gradient, stochastic and zeroth-order optimization
//! methods with convergence diagnostics.
//!
//! Everything is generic over the scalar type ([`Scalar`], implemented for `f32`
//! and `f64`); the aliases below fix `f64`.
//!
//! ```
//! use optlab::{make_problem, Params, Vector64};
//! use optlab::subgrad::{run_polyak_subgrad, SubgradConfig, StepRule};
//!
//! let (mut oracle, set) = make_problem::<f64>("abs1d", &Params::new(), 0).unwrap();
//! let cfg = SubgradConfig::new(StepRule::Polyak { fstar: 0.0 }, 10);
//! let out = run_polyak_subgrad(&mut oracle, &set, &Vector64::from_f64(&[0.25]), &cfg).unwrap();
//! assert_eq!(out.x[0], 0.0);
//! ```

pub mod error;
pub mod linalg;
pub mod noise;
pub mod oracle;
pub mod params;
pub mod problems;
pub mod rng;
pub mod scalar;
pub mod sets;
pub mod trace;
pub mod vector;

pub mod frankwolfe;
pub mod momentum;
pub mod smooth;
pub mod stochastic;
pub mod subgrad;
pub mod zeroorder;

pub use error::{OptError, Result};
pub use linalg::Matrix;
pub use noise::{wrap_noise, AbsMode, NoiseSpec, RelMode, StochDist, ZoBoundedMode};
pub use oracle::{CallCounts, Constants, FnProblem, OracleSuite, Problem, Quadratic};
pub use params::{ParamValue, Params};
pub use problems::{make_problem, CATALOG};
pub use rng::{derive_seed, Rng};
pub use scalar::Scalar;
pub use sets::FeasibleSet;
pub use trace::{Outcome, Recorder, RunControl, Status, Trace, TraceRow};
pub use vector::{RunningMean, Vector};

pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type Oracle64 = OracleSuite<f64>;
pub type Oracle32 = OracleSuite<f32>;
pub type Set64 = FeasibleSet<f64>;
pub type Trace64 = Trace<f64>;
pub type Matrix64 = Matrix<f64>;
