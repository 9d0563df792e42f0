use optlab::noise::{AbsMode, NoiseSpec, RelMode, StochDist, ZoBoundedMode};
use optlab::problems::{estimate_sharpness, estimate_subgrad_bound};
use optlab::{make_problem, OptError, Params, Rng, Vector64, CATALOG};
use proptest::prelude::*;

fn v(x: &[f64]) -> Vector64 {
    Vector64::from_f64(x)
}

#[test]
fn catalog_constants() {
    let (abs, _) = make_problem::<f64>("abs1d", &Params::new(), 0).unwrap();
    assert_eq!(abs.fstar, Some(0.0));
    assert_eq!(abs.xstar.as_ref().unwrap().as_slice(), &[0.0]);
    assert_eq!(abs.constants.m, Some(1.0));
    assert_eq!(abs.constants.alpha_sharp, Some(1.0));

    let p = Params::new().with("lambdas", vec![10.0, 1.0]);
    let (q, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
    assert_eq!(q.constants.l, Some(10.0));
    assert_eq!(q.constants.mu, Some(1.0));
    assert_eq!(q.fstar, Some(0.0));

    let (slp, _) = make_problem::<f64>("slp", &Params::new().with("rho", 1.0), 0).unwrap();
    assert_eq!(slp.fstar, Some(-1.0));
    assert_eq!(slp.xstar.as_ref().unwrap().as_slice(), &[1.0, 0.0]);
}

#[test]
fn unknown_problem_and_params() {
    assert!(matches!(
        make_problem::<f64>("nope", &Params::new(), 0),
        Err(OptError::UnknownProblem(_))
    ));
    assert!(make_problem::<f64>("abs1d", &Params::new().with("d", 3.0), 0).is_err());
}

#[test]
fn every_catalog_entry_has_consistent_dims() {
    for (name, _) in CATALOG {
        let (s, set) = make_problem::<f64>(name, &Params::new(), 7).unwrap();
        let x0 = s.default_start();
        assert_eq!(x0.dim(), s.dim(), "{name}");
        assert_eq!(set.dim(), s.dim(), "{name}");
        assert!(s.true_value(&x0).is_finite(), "{name}");
        if let (Some(fs), Some(xs)) = (s.fstar, s.xstar.as_ref()) {
            assert!((s.true_value(xs) - fs).abs() < 1e-9, "{name}");
        }
    }
}

#[test]
fn noise_none_is_transparent() {
    let p = Params::new().with("lambdas", vec![10.0, 1.0]);
    let (q, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
    let mut plain = q.clone();
    let mut wrapped = q.with_noise(NoiseSpec::None, Rng::new(5)).unwrap();
    let x = v(&[0.3, -1.7]);
    assert_eq!(plain.grad(&x).unwrap(), wrapped.grad(&x).unwrap());
    assert_eq!(plain.value(&x).to_bits(), wrapped.value(&x).to_bits());
}

#[test]
fn fixed_absolute_noise_on_degenerate3() {
    let (s, _) = make_problem::<f64>("degenerate3", &Params::new(), 0).unwrap();
    let mut s = s
        .with_noise(
            NoiseSpec::AbsoluteGrad {
                delta: 0.1,
                mode: AbsMode::Fixed(v(&[0.0, 0.0, 0.1])),
            },
            Rng::new(1),
        )
        .unwrap();
    assert_eq!(s.grad(&Vector64::zeros(3)).unwrap().as_slice(), &[0.0, 0.0, 0.1]);
}

#[test]
fn shrink_noise_halves_gradient() {
    let p = Params::new().with("lambdas", vec![10.0, 1.0]);
    let (q, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
    let mut q = q
        .with_noise(
            NoiseSpec::RelativeGrad {
                alpha: 0.5,
                mode: RelMode::Shrink,
            },
            Rng::new(1),
        )
        .unwrap();
    let x = v(&[1.0, 1.0]);
    let g = q.grad(&x).unwrap();
    let t = q.true_grad(&x).unwrap();
    assert_eq!(g.as_slice(), t.scaled(0.5).as_slice());
    assert_eq!(g.dist(&t) / t.norm(), 0.5);
}

#[test]
fn gradient_noise_needs_gradient_oracle() {
    let (s, _) = make_problem::<f64>("abs1d", &Params::new(), 0).unwrap();
    let r = s.with_noise(
        NoiseSpec::AdditiveStochGrad {
            sigma: 1.0,
            dist: StochDist::Gaussian,
        },
        Rng::new(0),
    );
    assert!(matches!(r, Err(OptError::IncompatibleNoise(_))));
}

#[test]
fn seeded_noise_is_reproducible() {
    let p = Params::new().with("lambdas", vec![3.0, 1.0, 2.0]);
    let mk = || {
        let (q, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
        q.with_noise(
            NoiseSpec::AdditiveStochGrad {
                sigma: 0.7,
                dist: StochDist::StudentT3,
            },
            Rng::new(99),
        )
        .unwrap()
    };
    let (mut a, mut b) = (mk(), mk());
    let x = v(&[0.1, 0.2, 0.3]);
    for _ in 0..50 {
        assert_eq!(a.grad(&x).unwrap(), b.grad(&x).unwrap());
    }
    let (pa, _) = make_problem::<f64>("phase_retrieval", &Params::new(), 4).unwrap();
    let (pb, _) = make_problem::<f64>("phase_retrieval", &Params::new(), 4).unwrap();
    let y = pa.default_start();
    assert_eq!(pa.true_subgrad(&y), pb.true_subgrad(&y));
}

#[test]
fn phase_retrieval_annulus_has_no_stationary_points() {
    let (s, _) = make_problem::<f64>("phase_retrieval", &Params::new(), 2).unwrap();
    let xs = s.xstar.clone().unwrap();
    let mut rng = Rng::new(8);
    let alpha = estimate_sharpness(&s, &mut rng, 1.0, 4000);
    let mu = s.constants.weak_convexity.unwrap();
    let r_max = 2.0 * alpha / mu;
    assert!(r_max > 0.0);
    for _ in 0..2000 {
        let u: Vector64 = rng.sphere(s.dim());
        let r = rng.uniform_range(1e-6, r_max * (1.0 - 1e-9));
        let x = xs.plus_scaled(r, &u);
        let d = s.dist_to_opt(&x).unwrap();
        if d > 0.0 && d < r_max {
            assert!(s.true_subgrad(&x).norm() > 0.0);
        }
    }
    let m = estimate_subgrad_bound(&s, &xs, 1.0, &mut rng, 1000);
    assert!(m >= alpha);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_noise_respects_bounds(
        x in prop::collection::vec(-3.0f64..3.0, 2),
        seed in 0u64..1000,
        delta in 0.0f64..1.0,
        alpha in 0.0f64..0.99,
    ) {
        let x = Vector64::from_vec(x);
        let p = Params::new().with("lambdas", vec![4.0, 1.0]);
        let (q, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
        let t = q.true_grad(&x).unwrap();
        let mut a = q.clone().with_noise(
            NoiseSpec::AbsoluteGrad { delta, mode: AbsMode::RandomDirection }, Rng::new(seed)).unwrap();
        prop_assert!(a.grad(&x).unwrap().dist(&t) <= delta * (1.0 + 1e-12));
        for mode in [RelMode::Shrink, RelMode::Grow, RelMode::RandomDirection] {
            let mut r = q.clone().with_noise(NoiseSpec::RelativeGrad { alpha, mode }, Rng::new(seed)).unwrap();
            prop_assert!(r.grad(&x).unwrap().dist(&t) <= alpha * t.norm() * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn value_noise_respects_bounds(
        x in prop::collection::vec(-3.0f64..3.0, 2),
        seed in 0u64..1000,
        delta in 0.0f64..1.0,
    ) {
        let x = Vector64::from_vec(x);
        let p = Params::new().with("lambdas", vec![4.0, 1.0]);
        let (q, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
        let f = q.true_value(&x);
        for mode in [ZoBoundedMode::DeterministicWorst, ZoBoundedMode::Random] {
            let mut z = q.clone().with_noise(NoiseSpec::ZoBoundedValue { delta, mode }, Rng::new(seed)).unwrap();
            prop_assert!((z.zo_value(&x) - f).abs() <= delta * (1.0 + 1e-12) + 1e-15);
        }
        let mut s = q.clone().with_noise(NoiseSpec::ZoStochValue { delta_tilde: delta }, Rng::new(seed)).unwrap();
        prop_assert!(((s.zo_value(&x) - f).abs() - delta).abs() <= 1e-12 * (1.0 + f.abs()));
    }
}
