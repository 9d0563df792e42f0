//! Experiment harness for `optlab`: JSON experiment configs, trace files and
//! empirical rate fits. The `optlab` binary wraps these.

pub mod config;
pub mod error;
pub mod rates;
pub mod run;
pub mod traceio;

pub use config::{apply_seed_env, load_config, parse_config, ExperimentSpec, MethodSpec, METHODS};
pub use error::{BenchError, Result};
pub use rates::{fit_rate, RateFit, RateModel};
pub use run::{run_experiment, RunResult, Summary};
pub use traceio::{read_trace, write_trace, TraceFormat};
