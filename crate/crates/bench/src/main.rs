use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optlab::CATALOG;
use optlab_bench::{
    apply_seed_env, fit_rate, load_config, read_trace, run_experiment, BenchError, RateModel, Summary,
    METHODS,
};

#[derive(Parser)]
#[command(name = "optlab", version, about = "Run optimization experiments and fit convergence rates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment and print its summary as JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.trace_path`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Fit a rate to the gaps of a trace file.
    Rates {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        model: RateModel,
        /// Fraction of the trace (by iteration, from the end) to fit.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
    },
    /// Run several experiments concurrently and print a table.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        configs: Vec<PathBuf>,
    },
    ListProblems,
    ListMethods,
}

fn run_one(config: &Path, trace: Option<PathBuf>) -> Result<Summary, BenchError> {
    let mut spec = load_config(config)?;
    apply_seed_env(&mut spec)?;
    if trace.is_some() {
        spec.output.trace_path = trace;
    }
    Ok(run_experiment(&spec)?.summary)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res: Result<(), BenchError> = match cli.cmd {
        Cmd::Run { config, trace } => run_one(&config, trace).map(|s| {
            println!("{}", serde_json::to_string_pretty(&s).expect("summary serializes"));
        }),
        Cmd::Rates { trace, model, window } => read_trace(&trace, None)
            .and_then(|t| fit_rate(&t, model, window))
            .map(|fit| println!("{}", serde_json::to_string_pretty(&fit).expect("fit serializes"))),
        Cmd::Compare { configs } => {
            let results: Vec<_> = std::thread::scope(|s| {
                let handles: Vec<_> = configs
                    .iter()
                    .map(|c| s.spawn(move || run_one(c, None)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("experiment thread panicked"))
                    .collect()
            });
            println!(
                "{:<32} {:<20} {:<16} {:>12} {:>12} {:>10} {:<17} {:>9}",
                "config", "method", "problem", "final_gap", "final_dist", "calls", "status", "time_s"
            );
            let mut worst: Option<BenchError> = None;
            for (c, r) in configs.iter().zip(results) {
                match r {
                    Ok(s) => println!(
                        "{:<32} {:<20} {:<16} {:>12} {:>12} {:>10} {:<17} {:>9.3}",
                        c.display(),
                        s.method,
                        s.problem,
                        fmt_opt(s.final_gap),
                        fmt_opt(s.final_dist),
                        s.oracle_calls,
                        s.status,
                        s.wall_time
                    ),
                    Err(e) => {
                        println!("{:<32} error: {e}", c.display());
                        if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                            worst = Some(e);
                        }
                    }
                }
            }
            worst.map_or(Ok(()), Err)
        }
        Cmd::ListProblems => {
            for (name, desc) in CATALOG {
                println!("{name:<20} {desc}");
            }
            Ok(())
        }
        Cmd::ListMethods => {
            for (name, desc) in METHODS {
                println!("{name:<20} {desc}");
            }
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
