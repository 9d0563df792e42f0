use optlab::frankwolfe::{run_fw, FwConfig, FwStep};
use optlab::smooth::{run_gd, SmoothConfig};
use optlab::subgrad::{run_polyak_subgrad, StepRule, SubgradConfig};
use optlab::{make_problem, Params, Vector32};

#[test]
fn f32_runs() {
    let (mut s, set) = make_problem::<f32>("norm2", &Params::new(), 0).unwrap();
    let cfg = SubgradConfig::new(StepRule::Polyak { fstar: 0.0f32 }, 10);
    let out = run_polyak_subgrad(&mut s, &set, &Vector32::from_f64(&[1.0, 2.0, 2.0]), &cfg).unwrap();
    assert!(out.x.norm() < 1e-6);

    let (mut q, _) = make_problem::<f32>("quad_diag", &Params::new(), 0).unwrap();
    let x0 = q.default_start();
    let out = run_gd(&mut q, &x0, &SmoothConfig::exact(300, 10.0f32).with_tol(1e-5)).unwrap();
    assert!(out.trace.final_gap().unwrap() < 1e-6);

    let (mut b, set) = make_problem::<f32>("fw_box", &Params::new(), 0).unwrap();
    let x0 = b.default_start();
    let run = run_fw(&mut b, &set, &x0, &FwConfig::new(FwStep::Classic, 100)).unwrap();
    assert!(run.outcome.trace.final_gap().unwrap() < 1e-2);
}
