use optlab::momentum::Variant;
use optlab::NoiseSpec;
use optlab_bench::config::{default_record_every, AveragingCfg, StepCfg};
use optlab_bench::{parse_config, BenchError, MethodSpec};

fn err_text(text: &str) -> String {
    match parse_config(text) {
        Ok(_) => panic!("expected an error for {text}"),
        Err(e) => {
            assert!(e.is_validation(), "{e}");
            assert_eq!(e.exit_code(), 2);
            e.to_string()
        }
    }
}

#[test]
fn minimal_document_gets_defaults() {
    let s = parse_config(r#"{"problem": "abs1d", "method": "polyak_subgrad", "iterations": 100}"#).unwrap();
    assert_eq!(s.problem.name, "abs1d");
    assert_eq!(s.problem.seed, 0);
    assert!(s.problem.params.is_empty());
    assert_eq!(s.noise, NoiseSpec::None);
    assert_eq!(s.method, MethodSpec::PolyakSubgrad(Default::default()));
    assert_eq!(s.budget.iterations, 100);
    assert_eq!(s.budget.max_oracle_calls, None);
    assert_eq!(s.output.record_every, 1);
    assert!(!s.output.record_x);
    assert!(s.output.trace_path.is_none());
}

#[test]
fn unknown_method_lists_available() {
    let msg = err_text(r#"{"problem": "abs1d", "method": "foo", "iterations": 1}"#);
    assert!(msg.contains("`foo`"), "{msg}");
    for name in ["polyak_subgrad", "frank_wolfe", "zo_sgd", "chebyshev"] {
        assert!(msg.contains(name), "{msg}");
    }
}

#[test]
fn unknown_problem_lists_available() {
    let msg = err_text(r#"{"problem": "nope", "method": "gd", "iterations": 1}"#);
    assert!(msg.contains("abs1d") && msg.contains("quad_diag"), "{msg}");
}

#[test]
fn adaptive_alpha_at_least_half_rejected() {
    let msg = err_text(
        r#"{"problem": "quad_diag", "method": {"name": "gd_rel_adaptive", "params": {"alpha": 0.6}}, "iterations": 10}"#,
    );
    assert!(msg.contains("alpha < 0.5"), "{msg}");
    assert!(msg.contains("0.6"), "{msg}");
    // boundary
    err_text(r#"{"problem": "quad_diag", "method": {"name": "gd_rel_adaptive", "params": {"alpha": 0.5}}, "iterations": 10}"#);
    parse_config(r#"{"problem": "quad_diag", "method": {"name": "gd_rel_adaptive", "params": {"alpha": 0.49}}, "iterations": 10}"#)
        .unwrap();
}

#[test]
fn missing_fields_are_named() {
    let msg = err_text(r#"{"problem": "abs1d", "method": "polyak_subgrad"}"#);
    assert!(msg.contains("`iterations`"), "{msg}");
    let msg = err_text(r#"{"method": "gd", "iterations": 1}"#);
    assert!(msg.contains("`problem`"), "{msg}");
    let msg = err_text(r#"{"problem": "abs1d", "method": {"name": "gd_abs", "params": {}}, "iterations": 1}"#);
    assert!(msg.contains("`delta`") && msg.contains("gd_abs"), "{msg}");
}

#[test]
fn syntax_errors_carry_line_info() {
    let msg = err_text("{\n  \"problem\": \"abs1d\",\n  \"method\": \n}");
    assert!(msg.contains("line 4"), "{msg}");
}

#[test]
fn unknown_keys_rejected_at_every_level() {
    for doc in [
        r#"{"problem": "abs1d", "method": "gd", "iterations": 1, "extra": 1}"#,
        r#"{"problem": {"name": "abs1d", "sede": 1}, "method": "gd", "iterations": 1}"#,
        r#"{"problem": "abs1d", "method": {"name": "gd", "param": {}}, "iterations": 1}"#,
        r#"{"problem": "abs1d", "method": {"name": "gd", "params": {"L": 1}}, "iterations": 1}"#,
        r#"{"problem": "abs1d", "method": "gd", "budget": {"iterations": 1, "calls": 3}}"#,
        r#"{"problem": "abs1d", "method": "gd", "iterations": 1, "output": {"every": 2}}"#,
        r#"{"problem": "abs1d", "noise": {"kind": "relative_grad", "alpha": 0.1, "beta": 1}, "method": "gd", "iterations": 1}"#,
    ] {
        let msg = err_text(doc);
        assert!(msg.contains("unknown field"), "{doc}: {msg}");
    }
}

#[test]
fn record_every_zero_rejected() {
    let msg = err_text(r#"{"problem": "abs1d", "method": "gd", "iterations": 1, "output": {"record_every": 0}}"#);
    assert!(msg.contains("record_every"), "{msg}");
}

#[test]
fn default_record_every_keeps_rows_bounded() {
    assert_eq!(default_record_every(0), 1);
    assert_eq!(default_record_every(99_997), 1);
    assert_eq!(default_record_every(99_998), 2);
    for n in [1usize, 99_997, 99_998, 100_000, 250_000, 10_000_000, 123_456_789] {
        let e = default_record_every(n);
        // the grid 0, e, 2e, ... plus the final row
        let rows = n / e + 1 + usize::from(n % e != 0);
        assert!(rows < 100_000, "n={n} e={e} rows={rows}");
        if e > 1 {
            let e1 = e - 1;
            assert!(n / e1 + 2 >= 100_000, "stride {e} not minimal for n={n}");
        }
    }
    let s = parse_config(r#"{"problem": "abs1d", "method": "gd", "iterations": 1000000}"#).unwrap();
    assert_eq!(s.output.record_every, 11);
}

#[test]
fn full_document() {
    let s = parse_config(
        r#"{
          "problem": {"name": "quad_diag", "params": {"lambdas": [10, 1]}, "seed": 3, "x0": [1, 2]},
          "noise": {"kind": "absolute_grad", "delta": 0.1, "fixed": [0, 0.1]},
          "method": {"name": "heavy_ball", "params": {"l": 10, "mu": 1}},
          "budget": {"iterations": 50, "max_oracle_calls": 77},
          "output": {"trace_path": "t.json", "record_every": 5, "record_x": true}
        }"#,
    )
    .unwrap();
    assert_eq!(s.problem.seed, 3);
    assert_eq!(s.problem.x0.as_deref(), Some(&[1.0, 2.0][..]));
    assert!(matches!(s.noise, NoiseSpec::AbsoluteGrad { delta, .. } if delta == 0.1));
    match &s.method {
        MethodSpec::Momentum(Variant::HeavyBall, p) => {
            assert_eq!(p.l, Some(10.0));
            assert_eq!(p.mu, Some(1.0));
        }
        m => panic!("{m:?}"),
    }
    assert_eq!(s.budget.max_oracle_calls, Some(77));
    assert_eq!(s.output.record_every, 5);
    assert!(s.output.record_x);
}

#[test]
fn sgd_step_and_averaging_forms() {
    let s = parse_config(
        r#"{"problem": "quad_diag", "method": {"name": "sgd", "params": {
            "step": {"rule": "decay", "gamma0": 0.5}, "averaging": {"tail": 0.25}, "batch": 4, "clip": 2}},
            "iterations": 10}"#,
    )
    .unwrap();
    let MethodSpec::Sgd(p) = s.method else { panic!() };
    assert_eq!(p.step, StepCfg::Decay { gamma0: 0.5, eta: 0.6 });
    assert_eq!(p.averaging, AveragingCfg::Tail(0.25));
    assert_eq!((p.batch, p.clip), (4, Some(2.0)));

    let s = parse_config(
        r#"{"problem": "quad_diag", "method": {"name": "sgd", "params": {
            "step": {"rule": "budget_const", "r": 1, "m": 2}, "averaging": "uniform"}}, "iterations": 10}"#,
    )
    .unwrap();
    let MethodSpec::Sgd(p) = s.method else { panic!() };
    assert_eq!(p.averaging, AveragingCfg::Uniform);
    assert_eq!(p.batch, 1);
}

#[test]
fn iterations_must_agree() {
    err_text(r#"{"problem": "abs1d", "method": "gd", "iterations": 1, "budget": {"iterations": 2}}"#);
    parse_config(r#"{"problem": "abs1d", "method": "gd", "iterations": 2, "budget": {"iterations": 2}}"#).unwrap();
}

#[test]
fn bad_problem_param_value() {
    let msg = err_text(r#"{"problem": {"name": "quad_diag", "params": {"lambdas": {"a": 1}}}, "method": "gd", "iterations": 1}"#);
    assert!(msg.contains("lambdas"), "{msg}");
}

#[test]
fn config_errors_are_validation() {
    let e = BenchError::Config("x".into());
    assert_eq!(e.exit_code(), 2);
}
