use optlab::{Status, Trace64, TraceRow, Vector64};
use optlab_bench::traceio::{trace_from_csv, trace_from_json, trace_to_csv, trace_to_json};
use optlab_bench::{read_trace, write_trace, TraceFormat};
use proptest::prelude::*;

fn row(iter: usize, f: f64, gap: Option<f64>) -> TraceRow<f64> {
    TraceRow {
        iter,
        x: None,
        f_value: f,
        f_gap: gap,
        dist_to_opt: gap.map(f64::sqrt),
        grad_norm: Some(0.5),
        step_size: 0.25,
        oracle_calls: 2 * iter as u64,
        dist_from_start: 0.0,
    }
}

#[test]
fn two_rows_to_csv() {
    let t = Trace64 {
        rows: vec![row(0, 1.0, Some(1.0)), row(1, 0.1, Some(0.1))],
        status: Status::BudgetExhausted,
    };
    let text = String::from_utf8(trace_to_csv(&t).unwrap()).unwrap();
    let lines: Vec<&str> = text.split('\n').collect();
    assert_eq!(lines.len(), 4, "{text:?}");
    assert_eq!(lines[0], "iter,f_value,f_gap,dist_to_opt,grad_norm,step_size,oracle_calls");
    assert_eq!(
        lines[1],
        "0,1.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0,5.0000000000000000e-1,2.5000000000000000e-1,0"
    );
    assert!(lines[2].starts_with("1,1.0000000000000001e-1,"), "{}", lines[2]);
    assert_eq!(lines[3], "");
    assert!(!text.contains('\r'));
}

#[test]
fn unknown_fstar_leaves_empty_gap() {
    let t = Trace64 {
        rows: vec![row(0, 3.0, None)],
        status: Status::BudgetExhausted,
    };
    let text = String::from_utf8(trace_to_csv(&t).unwrap()).unwrap();
    let line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields.len(), 7);
    assert_eq!(fields[2], "");
    assert_eq!(fields[3], "");
    let back = trace_from_csv(&text).unwrap();
    assert_eq!(back.rows[0].f_gap, None);
}

#[test]
fn csv_seventeen_significant_digits_round_trip() {
    let vals = [std::f64::consts::PI, 1.0 / 3.0, 1e-300, 123_456_789.123_456_79, -2.5e17, 5e-324];
    let t = Trace64 {
        rows: vals.iter().enumerate().map(|(i, &v)| row(i, v, Some(v.abs()))).collect(),
        status: Status::BudgetExhausted,
    };
    let text = String::from_utf8(trace_to_csv(&t).unwrap()).unwrap();
    let back = trace_from_csv(&text).unwrap();
    for (a, b) in t.rows.iter().zip(&back.rows) {
        assert_eq!(a.f_value.to_bits(), b.f_value.to_bits());
        assert_eq!(a.f_gap, b.f_gap);
        assert_eq!(a.oracle_calls, b.oracle_calls);
    }
    assert!(!text.contains(' '));
}

#[test]
fn csv_rejects_wrong_header() {
    assert!(trace_from_csv("iter,f\n0,1\n").is_err());
    let bad = "iter,f_value,f_gap,dist_to_opt,grad_norm,step_size,oracle_calls\n0,abc,,,,1,0\n";
    let e = trace_from_csv(bad).unwrap_err();
    assert!(e.to_string().contains("f_value"), "{e}");
}

#[test]
fn json_keeps_non_finite_and_status() {
    let mut r = row(3, f64::INFINITY, Some(f64::NAN));
    r.x = Some(Vector64::from_f64(&[1.0, f64::NEG_INFINITY]));
    r.dist_from_start = 2.0;
    let t = Trace64 {
        rows: vec![r],
        status: Status::Diverged,
    };
    let back = trace_from_json(std::str::from_utf8(&trace_to_json(&t).unwrap()).unwrap()).unwrap();
    assert_eq!(back.status, Status::Diverged);
    let b = &back.rows[0];
    assert_eq!(b.f_value, f64::INFINITY);
    assert!(b.f_gap.unwrap().is_nan());
    assert_eq!(b.x.as_ref().unwrap()[1], f64::NEG_INFINITY);
    assert_eq!(b.dist_from_start, 2.0);
}

#[test]
fn write_is_atomic_and_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let t = Trace64 {
        rows: vec![row(0, 1.0, Some(1.0)), row(5, 0.5, None)],
        status: Status::Converged,
    };
    let csv_path = dir.path().join("nested/t.csv");
    write_trace(&t, &csv_path, None).unwrap();
    // overwrite in place
    write_trace(&t, &csv_path, None).unwrap();
    let back = read_trace(&csv_path, None).unwrap();
    assert_eq!(back.rows, t.rows);
    let json_path = dir.path().join("t.json");
    write_trace(&t, &json_path, None).unwrap();
    assert_eq!(read_trace(&json_path, None).unwrap(), t);
    // explicit format beats the extension
    let odd = dir.path().join("t.txt");
    write_trace(&t, &odd, Some(TraceFormat::Json)).unwrap();
    assert_eq!(read_trace(&odd, Some(TraceFormat::Json)).unwrap(), t);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn write_to_unwritable_path_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f");
    std::fs::write(&file, "x").unwrap();
    let t = Trace64 {
        rows: vec![row(0, 1.0, None)],
        status: Status::Converged,
    };
    let e = write_trace(&t, &file.join("sub/t.csv"), None).unwrap_err();
    assert!(!e.is_validation());
    assert_eq!(e.exit_code(), 1);
}

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>(),
        1 => Just(f64::NAN),
        1 => Just(f64::INFINITY),
        1 => Just(f64::NEG_INFINITY),
    ]
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

fn arb_row() -> impl Strategy<Value = TraceRow<f64>> {
    (
        0usize..1_000_000,
        proptest::option::of(proptest::collection::vec(any_f64(), 1..4)),
        any_f64(),
        proptest::option::of(any_f64()),
        proptest::option::of(any_f64()),
        proptest::option::of(any_f64()),
        any_f64(),
        any::<u64>(),
        any_f64(),
    )
        .prop_map(|(iter, x, f, g, d, gn, s, c, ds)| TraceRow {
            iter,
            x: x.map(|v| Vector64::from_f64(&v)),
            f_value: f,
            f_gap: g,
            dist_to_opt: d,
            grad_norm: gn,
            step_size: s,
            oracle_calls: c,
            dist_from_start: ds,
        })
}

fn opt_same(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => same(a, b),
        (None, None) => true,
        _ => false,
    }
}

proptest! {
    #[test]
    fn json_round_trip_field_for_field(rows in proptest::collection::vec(arb_row(), 0..20)) {
        let t = Trace64 { rows, status: Status::EarlyStopped };
        let back = trace_from_json(std::str::from_utf8(&trace_to_json(&t).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(back.status, t.status);
        prop_assert_eq!(back.rows.len(), t.rows.len());
        for (a, b) in t.rows.iter().zip(&back.rows) {
            prop_assert_eq!(a.iter, b.iter);
            prop_assert_eq!(a.oracle_calls, b.oracle_calls);
            prop_assert!(same(a.f_value, b.f_value));
            prop_assert!(same(a.step_size, b.step_size));
            prop_assert!(same(a.dist_from_start, b.dist_from_start));
            prop_assert!(opt_same(a.f_gap, b.f_gap));
            prop_assert!(opt_same(a.dist_to_opt, b.dist_to_opt));
            prop_assert!(opt_same(a.grad_norm, b.grad_norm));
            match (&a.x, &b.x) {
                (Some(xa), Some(xb)) => {
                    prop_assert_eq!(xa.dim(), xb.dim());
                    for (p, q) in xa.iter().zip(xb.iter()) {
                        prop_assert!(same(*p, *q));
                    }
                }
                (None, None) => {}
                _ => prop_assert!(false, "x presence differs"),
            }
        }
    }

    #[test]
    fn csv_round_trip_scalar_columns(rows in proptest::collection::vec(arb_row(), 0..20)) {
        let t = Trace64 { rows, status: Status::BudgetExhausted };
        let back = trace_from_csv(std::str::from_utf8(&trace_to_csv(&t).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(back.rows.len(), t.rows.len());
        for (a, b) in t.rows.iter().zip(&back.rows) {
            prop_assert_eq!(a.iter, b.iter);
            prop_assert_eq!(a.oracle_calls, b.oracle_calls);
            prop_assert!(same(a.f_value, b.f_value));
            prop_assert!(same(a.step_size, b.step_size));
            prop_assert!(opt_same(a.f_gap, b.f_gap));
            prop_assert!(opt_same(a.dist_to_opt, b.dist_to_opt));
            prop_assert!(opt_same(a.grad_norm, b.grad_norm));
        }
    }
}
