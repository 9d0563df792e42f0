use optlab::momentum::{
    chebyshev_coefficients, chebyshev_deltas, chebyshev_limit, heavy_ball_coefficients,
    run_cg_quadratic, run_momentum, taylor_drori_coefficients, CgConfig, MomentumConfig, Variant,
};
use optlab::smooth::{run_gd, SmoothConfig};
use optlab::{make_problem, OracleSuite, Params, Rng, RunControl, Trace, Vector64};

fn quad(lambdas: &[f64]) -> OracleSuite<f64> {
    make_problem("quad_diag", &Params::new().with("lambdas", lambdas.to_vec()), 0)
        .unwrap()
        .0
}

fn iters_to(trace: &Trace<f64>, eps: f64) -> Option<usize> {
    trace.rows.iter().find(|r| r.f_gap.unwrap() <= eps).map(|r| r.iter)
}

const KAPPA400: [f64; 4] = [400.0, 50.0, 7.0, 1.0];

#[test]
fn heavy_ball_collapses_when_mu_equals_l() {
    let (step, mom) = heavy_ball_coefficients::<f64>(3.0, 3.0);
    assert_eq!(mom, 0.0);
    assert!((step - 1.0 / 3.0).abs() < 1e-16);
    let mut q = quad(&[3.0, 3.0, 3.0]);
    let cfg = MomentumConfig::new(Variant::HeavyBall, 3.0, 3.0, 5).with_tol(1e-14);
    let run = run_momentum(&mut q, &Vector64::from_f64(&[0.7, -2.0, 5.0]), &cfg).unwrap();
    assert!(run.outcome.x.norm() < 1e-15);
    assert_eq!(run.outcome.trace.iterations(), 1);
}

#[test]
fn chebyshev_first_steps() {
    let d = chebyshev_deltas::<f64>(4.0, 1.0, 3);
    assert!((d[0] - 3.0 / 13.0).abs() < 1e-16);
    let mut q = quad(&[4.0, 1.0]);
    let x0 = Vector64::from_f64(&[1.0, 1.0]);
    let cfg = MomentumConfig::new(Variant::Chebyshev, 4.0, 1.0, 1)
        .with_control(RunControl::default().with_record_x(true));
    let run = run_momentum(&mut q, &x0, &cfg).unwrap();
    let g0 = q.true_grad(&x0).unwrap();
    let expect = x0.plus_scaled(-0.4, &g0);
    assert!(run.outcome.x.dist(&expect) < 1e-15);
}

#[test]
fn chebyshev_limit_and_heavy_ball_agree() {
    let d = chebyshev_deltas(4.0f64, 1.0, 60);
    assert!((d[59] - chebyshev_limit(4.0, 1.0)).abs() < 1e-10);
    // at κ = 400 the error decays like ρ^{2k} with ρ = 19/21, so k = 60 is not enough
    let (l, mu) = (400.0f64, 1.0);
    let d = chebyshev_deltas(l, mu, 200);
    assert!((d[199] - chebyshev_limit(l, mu)).abs() < 1e-10);
    assert!((d[59] - chebyshev_limit(l, mu)).abs() > 1e-7);
    let (cs, cm) = chebyshev_coefficients(l, mu, chebyshev_limit(l, mu));
    let (hs, hm) = heavy_ball_coefficients(l, mu);
    assert!((cs - hs).abs() < 1e-12);
    assert!((cm - hm).abs() < 1e-12);
}

#[test]
fn taylor_drori_first_step() {
    let c = taylor_drori_coefficients(0.0, 0.0);
    assert_eq!((c.a_next, c.tau, c.delta), (4.0, 1.0, 2.0));
    let l = 5.0;
    let mut q = quad(&[5.0, 2.0]);
    let x0 = Vector64::from_f64(&[1.0, -1.0]);
    let cfg = MomentumConfig::new(Variant::TaylorDrori, l, 0.0, 1)
        .with_control(RunControl::default().with_record_x(true));
    let run = run_momentum(&mut q, &x0, &cfg).unwrap();
    let g = q.true_grad(&x0).unwrap();
    assert!(run.outcome.x.dist(&x0.plus_scaled(-2.0 / l, &g)) < 1e-15);
    let sec = run.secondary.unwrap();
    let x1 = sec.rows[1].x.as_ref().unwrap();
    assert!(x1.dist(&x0.plus_scaled(-1.0 / l, &g)) < 1e-15);
}

#[test]
fn acceleration_against_gd() {
    let (l, mu) = (400.0, 1.0);
    let x0 = Vector64::filled(4, 1.0);
    let mut q = quad(&KAPPA400);
    let gd = run_gd(&mut q, &x0, &SmoothConfig::exact(20_000, l).with_tol(0.0)).unwrap();
    let n_gd = iters_to(&gd.trace, 1e-9).unwrap();
    for variant in [Variant::Chebyshev, Variant::NesterovSC, Variant::HeavyBall] {
        let mut q = quad(&KAPPA400);
        let run = run_momentum(&mut q, &x0, &MomentumConfig::new(variant, l, mu, 2000)).unwrap();
        let n = iters_to(&run.outcome.trace, 1e-9).unwrap();
        assert!(n_gd as f64 / n as f64 >= 5.0, "{variant:?}: {n_gd}/{n}");
    }
}

#[test]
fn nesterov_convex_rate() {
    let l = 400.0;
    let x0 = Vector64::filled(4, 1.0);
    let r2 = x0.norm_sq();
    let mut q = quad(&KAPPA400);
    let run = run_momentum(&mut q, &x0, &MomentumConfig::new(Variant::NesterovCvx, l, 0.0, 500)).unwrap();
    for row in &run.outcome.trace.rows {
        let n = row.iter;
        if (10..=500).contains(&n) {
            assert!(row.f_gap.unwrap() <= 4.0 * l * r2 / (n * n) as f64, "N={n}");
        }
    }
}

#[test]
fn taylor_drori_strongly_convex_converges() {
    let (l, mu) = (400.0, 1.0);
    let mut q = quad(&KAPPA400);
    let run = run_momentum(&mut q, &Vector64::filled(4, 1.0), &MomentumConfig::new(Variant::TaylorDrori, l, mu, 400))
        .unwrap();
    assert!(run.outcome.trace.final_gap().unwrap() < 1e-9);
}

#[test]
fn momentum_validation() {
    assert!(MomentumConfig::new(Variant::Chebyshev, 1.0, 1.0, 5).validate().is_err());
    assert!(MomentumConfig::new(Variant::HeavyBall, 1.0, 0.0, 5).validate().is_err());
    assert!(MomentumConfig::new(Variant::TaylorDrori, 1.0, 0.0, 5).validate().is_ok());
}

#[test]
fn cg_finite_termination() {
    let mut rng = Rng::new(17);
    for _ in 0..10 {
        let lambdas: Vec<f64> = (0..5).map(|_| rng.uniform_range(0.5, 50.0)).collect();
        let mut q = quad(&lambdas);
        let x0: Vector64 = rng.gaussian_vec(5);
        let out = run_cg_quadratic(&mut q, &x0, &CgConfig::new(5).with_tol(1e-8)).unwrap();
        assert!(out.trace.iterations() <= 5);
        assert!(q.true_grad(&out.x).unwrap().norm() <= 1e-8);
    }
}

#[test]
fn cg_trivial_cases() {
    let mut q = quad(&[3.0, 1.0]);
    let out = run_cg_quadratic(&mut q, &Vector64::zeros(2), &CgConfig::new(10)).unwrap();
    assert_eq!(out.trace.iterations(), 0);
    let mut one = quad(&[7.0]);
    let out = run_cg_quadratic(&mut one, &Vector64::from_f64(&[2.0]), &CgConfig::new(10)).unwrap();
    assert_eq!(out.trace.iterations(), 1);
    assert!(out.x[0].abs() < 1e-15);
    let (mut rosen, _) = make_problem::<f64>("rosenbrock", &Params::new(), 0).unwrap();
    assert!(run_cg_quadratic(&mut rosen, &Vector64::zeros(2), &CgConfig::new(3)).is_err());
}

#[test]
fn cg_no_worse_than_chebyshev() {
    let mut rng = Rng::new(4);
    for _ in 0..10 {
        let mut lambdas: Vec<f64> = (0..6).map(|_| rng.uniform_range(1.0, 100.0)).collect();
        lambdas.push(1.0);
        lambdas.push(100.0);
        let x0: Vector64 = rng.gaussian_vec(8);
        for n in [3, 6, 10] {
            let mut a = quad(&lambdas);
            let mut b = quad(&lambdas);
            let cg = run_cg_quadratic(&mut a, &x0, &CgConfig::new(n).with_tol(0.0)).unwrap();
            let ch = run_momentum(&mut b, &x0, &MomentumConfig::new(Variant::Chebyshev, 100.0, 1.0, n)).unwrap();
            assert!(cg.trace.final_gap().unwrap() <= ch.outcome.trace.final_gap().unwrap() * (1.0 + 1e-9) + 1e-300);
        }
    }
}

#[test]
fn momentum_may_increase_f_without_diverging() {
    let mut q = quad(&KAPPA400);
    let run = run_momentum(&mut q, &Vector64::filled(4, 1.0), &MomentumConfig::new(Variant::HeavyBall, 400.0, 1.0, 200))
        .unwrap();
    let rows = &run.outcome.trace.rows;
    assert!(rows.windows(2).any(|w| w[1].f_value > w[0].f_value));
    assert_ne!(run.outcome.trace.status, optlab::Status::Diverged);
}
