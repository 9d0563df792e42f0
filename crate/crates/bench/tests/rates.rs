use optlab::{Status, Trace64, TraceRow};
use optlab_bench::{fit_rate, RateModel};
use proptest::prelude::*;

fn trace_from(gaps: impl IntoIterator<Item = (usize, f64)>) -> Trace64 {
    Trace64 {
        rows: gaps
            .into_iter()
            .map(|(k, g)| TraceRow {
                iter: k,
                x: None,
                f_value: g,
                f_gap: Some(g),
                dist_to_opt: None,
                grad_norm: None,
                step_size: 0.0,
                oracle_calls: k as u64,
                dist_from_start: 0.0,
            })
            .collect(),
        status: Status::BudgetExhausted,
    }
}

#[test]
fn four_over_k() {
    let t = trace_from((1..=1000).map(|k| (k, 4.0 / k as f64)));
    let fit = fit_rate(&t, RateModel::Sublinear, 0.5).unwrap();
    assert!((fit.estimate - 1.0).abs() <= 0.01, "{fit:?}");
    assert!(fit.r_squared >= 0.999);
    assert_eq!(fit.window, 0.5);
}

#[test]
fn half_to_the_k() {
    let t = trace_from((0..=60).map(|k| (k, 0.5f64.powi(k as i32))));
    let fit = fit_rate(&t, RateModel::Geometric, 1.0).unwrap();
    assert!((fit.estimate - 0.5).abs() <= 1e-6, "{fit:?}");
    assert!(fit.r_squared >= 0.999_999);
}

#[test]
fn geometric_on_subsampled_rows() {
    let t = trace_from((0..=300).step_by(7).map(|k| (k, 3.0 * 0.9f64.powi(k as i32))));
    let fit = fit_rate(&t, RateModel::Geometric, 1.0).unwrap();
    assert!((fit.estimate - 0.9).abs() <= 1e-9, "{fit:?}");
}

#[test]
fn window_keeps_the_tail() {
    // 1/k early, 1/k² late: the tail fit sees p = 2
    let t = trace_from((1..=1000).map(|k| {
        let kf = k as f64;
        (k, if k <= 500 { 1.0 / kf } else { 500.0 / (kf * kf) })
    }));
    let tail = fit_rate(&t, RateModel::Sublinear, 0.4).unwrap();
    assert!((tail.estimate - 2.0).abs() < 1e-9, "{tail:?}");
    assert_eq!(tail.points, 401);
}

#[test]
fn skips_nonpositive_gaps() {
    let mut rows: Vec<(usize, f64)> = (1..=40).map(|k| (k, 1.0 / k as f64)).collect();
    rows[30].1 = 0.0;
    rows[31].1 = -1e-3;
    let fit = fit_rate(&trace_from(rows), RateModel::Sublinear, 1.0).unwrap();
    assert_eq!(fit.points, 38);
    assert!((fit.estimate - 1.0).abs() < 1e-12);
}

#[test]
fn too_few_points() {
    let t = trace_from((1..=9).map(|k| (k, 1.0 / k as f64)));
    let e = fit_rate(&t, RateModel::Sublinear, 1.0).unwrap_err();
    assert!(e.to_string().contains("at least 10"), "{e}");
    let t = trace_from((1..=30).map(|k| (k, 0.0)));
    assert!(fit_rate(&t, RateModel::Geometric, 1.0).is_err());
    assert!(fit_rate(&t, RateModel::Geometric, 0.0).is_err());
    assert!(fit_rate(&t, RateModel::Geometric, 1.5).is_err());
}

#[test]
fn r_squared_in_unit_interval_on_noise() {
    let t = trace_from((1..=50).map(|k| (k, if k % 2 == 0 { 1.0 } else { 2.0 })));
    let fit = fit_rate(&t, RateModel::Sublinear, 1.0).unwrap();
    assert!((0.0..=1.0).contains(&fit.r_squared));
}

proptest! {
    #[test]
    fn scaling_gaps_leaves_estimates(c in 1e-6f64..1e6, p in 0.2f64..3.0, q in 0.5f64..0.99) {
        let sub = |s: f64| trace_from((1..=200).map(|k| (k, s * (k as f64).powf(-p) * (1.0 + 0.1 * ((k * 7 % 5) as f64)))));
        let a = fit_rate(&sub(1.0), RateModel::Sublinear, 0.5).unwrap();
        let b = fit_rate(&sub(c), RateModel::Sublinear, 0.5).unwrap();
        prop_assert!((a.estimate - b.estimate).abs() <= 1e-12, "{} vs {}", a.estimate, b.estimate);

        let geo = |s: f64| trace_from((0..=100).map(|k| (k, s * q.powi(k as i32) * (1.0 + 0.1 * ((k * 3 % 4) as f64)))));
        let a = fit_rate(&geo(1.0), RateModel::Geometric, 0.5).unwrap();
        let b = fit_rate(&geo(c), RateModel::Geometric, 0.5).unwrap();
        prop_assert!((a.estimate - b.estimate).abs() <= 1e-12, "{} vs {}", a.estimate, b.estimate);
    }
}
