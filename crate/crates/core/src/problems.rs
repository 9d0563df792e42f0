//! Built-in problem catalog.

use crate::error::{invalid_param, OptError, Result};
use crate::linalg::Matrix;
use crate::oracle::{Constants, OracleSuite, Problem, Quadratic};
use crate::params::Params;
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;
use crate::vector::Vector;

/// `(name, description)` for every catalog entry.
pub const CATALOG: &[(&str, &str)] = &[
    ("abs1d", "f(x) = |x| on R"),
    ("l1_system", "f(x) = sum |<a_i,x> - b_i| with a consistent planted system; params d, m"),
    ("norm2", "f(x) = ||x - a||_2; params a"),
    ("quad_diag", "f(x) = 1/2 sum l_i (x_i - c_i)^2; params lambdas, center"),
    ("sqdist", "f(x) = 1/2 ||x - a||^2 over a set; params a, set (full|box|ball|simplex), lo, hi, radius"),
    ("fw_box", "f(x) = x1^2 + (1 + x2)^2 on [-1,1]x[0,1]"),
    ("degenerate3", "f(x) = <Ax,x>, A = diag(a1, a2, 0); params diag"),
    ("rosenbrock", "f(x) = (1 - x1)^2 + 100 (x2 - x1^2)^2"),
    ("nesterov_skokov_toy", "f(x) = x1^2/2 + x2^4/4 - x2^2/2"),
    ("phase_retrieval", "f(x) = (1/m) sum |<a_i,x>^2 - b_i| with planted unit x*; params m, n"),
    ("slp", "min -x1 s.t. rho (cos(j pi/10) x1 + sin(j pi/10) x2) <= rho, j = 0..19; params rho"),
    ("logistic_small", "mean logistic loss on seeded gaussian data over [-1,1]^d; params m, d"),
];

#[inline]
fn s<F: Scalar>(v: f64) -> F {
    F::lit(v)
}

#[inline]
fn sign0<F: Scalar>(v: F) -> F {
    if v > F::zero() {
        F::one()
    } else if v < F::zero() {
        -F::one()
    } else {
        F::zero()
    }
}

/// Builds a catalog problem. Data are drawn from `seed` where the problem is random.
pub fn make_problem<F: Scalar>(
    name: &str,
    params: &Params,
    seed: u64,
) -> Result<(OracleSuite<F>, FeasibleSet<F>)> {
    match name {
        "abs1d" => {
            params.expect_keys(name, &[])?;
            let suite = OracleSuite::new(Abs1d)
                .with_fstar(F::zero())
                .with_xstar(Vector::zeros(1))
                .with_constants(Constants {
                    m: Some(F::one()),
                    alpha_sharp: Some(F::one()),
                    ..Default::default()
                });
            Ok((suite, FeasibleSet::full(1)))
        }
        "l1_system" => {
            params.expect_keys(name, &["d", "m"])?;
            let d = params.count("d", 5)?;
            let m = params.count("m", 8)?;
            if m < d {
                return Err(invalid_param("m", format!("need m ≥ d for a sharp minimum, got m={m}, d={d}")));
            }
            let p = L1System::<F>::generate(d, m, seed);
            let (smin, smax) = p.a.singular_value_range();
            let row_sum: f64 = (0..m).map(|i| p.a.row(i).norm().as_f64()).sum();
            let lip = row_sum.min((m as f64).sqrt() * smax);
            let xstar = p.xstar.clone();
            let suite = OracleSuite::new(p)
                .with_fstar(F::zero())
                .with_xstar(xstar)
                .with_constants(Constants {
                    m: Some(s(lip)),
                    alpha_sharp: Some(s(smin)),
                    ..Default::default()
                });
            Ok((suite, FeasibleSet::full(d)))
        }
        "norm2" => {
            params.expect_keys(name, &["a"])?;
            let a = params.list("a")?.unwrap_or_else(|| vec![0.0; 3]);
            if a.is_empty() {
                return Err(invalid_param("a", "must be non-empty"));
            }
            let a: Vector<F> = Vector::from_f64(&a);
            let d = a.dim();
            let suite = OracleSuite::new(Norm2 { a: a.clone() })
                .with_fstar(F::zero())
                .with_xstar(a)
                .with_constants(Constants {
                    m: Some(F::one()),
                    alpha_sharp: Some(F::one()),
                    ..Default::default()
                });
            Ok((suite, FeasibleSet::full(d)))
        }
        "quad_diag" => {
            params.expect_keys(name, &["lambdas", "center"])?;
            let lambdas = params.list("lambdas")?.unwrap_or_else(|| vec![10.0, 1.0]);
            if lambdas.is_empty() || lambdas.iter().any(|&l| l <= 0.0) {
                return Err(invalid_param("lambdas", "need at least one entry, all > 0"));
            }
            let d = lambdas.len();
            let center = params.list("center")?.unwrap_or_else(|| vec![0.0; d]);
            if center.len() != d {
                return Err(invalid_param("center", format!("length {} != {}", center.len(), d)));
            }
            let lmax = lambdas.iter().copied().fold(f64::MIN, f64::max);
            let lmin = lambdas.iter().copied().fold(f64::MAX, f64::min);
            let p = QuadDiag::<F>::new(&lambdas, &center);
            let suite = OracleSuite::new(p)
                .with_fstar(F::zero())
                .with_xstar(Vector::from_f64(&center))
                .with_constants(Constants {
                    l: Some(s(lmax)),
                    mu: Some(s(lmin)),
                    ..Default::default()
                });
            Ok((suite, FeasibleSet::full(d)))
        }
        "sqdist" => {
            params.expect_keys(name, &["a", "set", "lo", "hi", "radius"])?;
            let a = params.list("a")?.unwrap_or_else(|| vec![0.2, 0.3, 0.9]);
            if a.is_empty() {
                return Err(invalid_param("a", "must be non-empty"));
            }
            let d = a.len();
            let set = match params.text("set", "full")?.as_str() {
                "full" => FeasibleSet::full(d),
                "simplex" => FeasibleSet::simplex(d)?,
                "box" => FeasibleSet::cube(d, s(params.num("lo", -1.0)?), s(params.num("hi", 1.0)?))?,
                "ball" => FeasibleSet::ball(Vector::zeros(d), s(params.positive("radius", 1.0)?))?,
                other => return Err(invalid_param("set", format!("unknown set `{other}`"))),
            };
            let a: Vector<F> = Vector::from_f64(&a);
            let xstar = set.project(&a)?;
            let fstar = s::<F>(0.5) * xstar.dist_sq(&a);
            let start = set.project(&Vector::zeros(d))?;
            let p = SqDist::new(a, start);
            let suite = OracleSuite::new(p)
                .with_fstar(fstar)
                .with_xstar(xstar)
                .with_constants(Constants {
                    l: Some(F::one()),
                    mu: Some(F::one()),
                    ..Default::default()
                });
            Ok((suite, set))
        }
        "fw_box" => {
            params.expect_keys(name, &[])?;
            let set = FeasibleSet::new_box(Vector::from_f64(&[-1.0, 0.0]), Vector::from_f64(&[1.0, 1.0]))?;
            let suite = OracleSuite::new(FwBox::<F>::new())
                .with_fstar(F::one())
                .with_xstar(Vector::zeros(2))
                .with_constants(Constants {
                    l: Some(s(2.0)),
                    mu: Some(s(2.0)),
                    ..Default::default()
                });
            Ok((suite, set))
        }
        "degenerate3" => {
            params.expect_keys(name, &["diag"])?;
            let dg = params.list("diag")?.unwrap_or_else(|| vec![1.0, 0.1]);
            if dg.len() != 2 || !(dg[0] >= dg[1] && dg[1] > 0.0) {
                return Err(invalid_param("diag", "expected [a1, a2] with a1 ≥ a2 > 0"));
            }
            let suite = OracleSuite::new(Degenerate3::<F>::new(dg[0], dg[1]))
                .with_fstar(F::zero())
                .with_xstar(Vector::zeros(3))
                .with_constants(Constants {
                    l: Some(s(2.0 * dg[0])),
                    mu: Some(s(2.0 * dg[1])),
                    ..Default::default()
                });
            Ok((suite, FeasibleSet::full(3)))
        }
        "rosenbrock" => {
            params.expect_keys(name, &[])?;
            let suite = OracleSuite::new(Rosenbrock)
                .with_fstar(F::zero())
                .with_xstar(Vector::from_f64(&[1.0, 1.0]));
            Ok((suite, FeasibleSet::full(2)))
        }
        "nesterov_skokov_toy" => {
            params.expect_keys(name, &[])?;
            let suite = OracleSuite::new(NesterovSkokovToy)
                .with_fstar(s(-0.25))
                .with_xstar(Vector::from_f64(&[0.0, 1.0]));
            Ok((suite, FeasibleSet::full(2)))
        }
        "phase_retrieval" => {
            params.expect_keys(name, &["m", "n"])?;
            let n = params.count("n", 5)?;
            let m = params.count("m", 60)?;
            if m < 2 * n {
                return Err(invalid_param("m", format!("need m ≥ 2n for identifiability, got m={m}, n={n}")));
            }
            let p = PhaseRetrieval::<F>::generate(m, n, seed);
            let rho = 2.0 * p.a.gram().sym_eigenvalues().last().copied().unwrap_or(0.0) / m as f64;
            let xstar = p.xstar.clone();
            let mut suite = OracleSuite::new(p)
                .with_fstar(F::zero())
                .with_xstar(xstar.clone());
            let mut rng = Rng::new(seed).split(1);
            let alpha = estimate_sharpness(&suite, &mut rng, 1.0, 4000);
            let lip = estimate_subgrad_bound(&suite, &xstar, 1.0, &mut rng, 4000);
            suite.constants = Constants {
                m: Some(lip),
                alpha_sharp: Some(alpha),
                weak_convexity: Some(s(rho)),
                ..Default::default()
            };
            Ok((suite, FeasibleSet::full(n)))
        }
        "slp" => {
            params.expect_keys(name, &["rho"])?;
            let rho = params.positive("rho", 1.0)?;
            let suite = OracleSuite::new(SlpObjective)
                .with_constraint(SlpConstraint::<F>::new(rho))
                .with_fstar(-F::one())
                .with_xstar(Vector::from_f64(&[1.0, 0.0]))
                .with_constants(Constants {
                    m: Some(F::one()),
                    alpha_sharp: Some(s(rho / 2.0)),
                    mg: Some(s(rho)),
                    ..Default::default()
                });
            Ok((suite, FeasibleSet::full(2)))
        }
        "logistic_small" => {
            params.expect_keys(name, &["m", "d"])?;
            let d = params.count("d", 3)?;
            let m = params.count("m", 40)?;
            let p = Logistic::<F>::generate(m, d, seed);
            let lmax = p.a.gram().sym_eigenvalues().last().copied().unwrap_or(0.0);
            let suite = OracleSuite::new(p).with_constants(Constants {
                l: Some(s(lmax / (4.0 * m as f64))),
                ..Default::default()
            });
            Ok((suite, FeasibleSet::cube(d, -F::one(), F::one())?))
        }
        other => Err(OptError::UnknownProblem(format!(
            "{other} (available: {})",
            CATALOG.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// `min f(x)/dist(x, X*)` over `x = x* + t·u`, `t ∈ (0, radius]`, `u` on the sphere.
/// An empirical estimate; it can only overstate the true sharpness constant.
pub fn estimate_sharpness<F: Scalar>(suite: &OracleSuite<F>, rng: &mut Rng, radius: f64, samples: usize) -> F {
    let xstar = suite.xstar.clone().expect("x* required");
    let fstar = suite.fstar.expect("f* required");
    let mut best = F::infinity();
    for _ in 0..samples {
        let u: Vector<F> = rng.sphere(xstar.dim());
        let t = radius * (1.0 - rng.uniform01());
        let x = xstar.plus_scaled(s(t), &u);
        let dist = suite.dist_to_opt(&x).unwrap_or_else(|| x.dist(&xstar));
        if dist > F::zero() {
            best = best.min((suite.true_value(&x) - fstar) / dist);
        }
    }
    best
}

/// `max ||∂f(x)||` over `x` uniform-direction samples in the ball of `radius` around `center`.
pub fn estimate_subgrad_bound<F: Scalar>(
    suite: &OracleSuite<F>,
    center: &Vector<F>,
    radius: f64,
    rng: &mut Rng,
    samples: usize,
) -> F {
    let mut best = F::zero();
    for _ in 0..samples {
        let u: Vector<F> = rng.sphere(center.dim());
        let t = radius * rng.uniform01();
        let x = center.plus_scaled(s(t), &u);
        best = best.max(suite.true_subgrad(&x).norm());
    }
    best
}

#[derive(Clone, Debug)]
pub struct Abs1d;

impl<F: Scalar> Problem<F> for Abs1d {
    fn name(&self) -> &str {
        "abs1d"
    }
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &Vector<F>) -> F {
        x[0].abs()
    }
    /// `0` at the kink.
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        Vector::from_vec(vec![sign0(x[0])])
    }
    fn default_start(&self) -> Vector<F> {
        Vector::from_vec(vec![F::one()])
    }
}

/// `Σ|⟨aᵢ,x⟩ − bᵢ|` with `b = A x*`.
#[derive(Clone, Debug)]
pub struct L1System<F> {
    pub a: Matrix<F>,
    pub b: Vector<F>,
    pub xstar: Vector<F>,
}

impl<F: Scalar> L1System<F> {
    pub fn generate(d: usize, m: usize, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let rows: Vec<Vector<F>> = (0..m).map(|_| rng.gaussian_vec(d)).collect();
        let a = Matrix::from_rows(&rows);
        let xstar: Vector<F> = rng.gaussian_vec(d);
        let b = a.matvec(&xstar);
        Self { a, b, xstar }
    }
}

impl<F: Scalar> Problem<F> for L1System<F> {
    fn name(&self) -> &str {
        "l1_system"
    }
    fn dim(&self) -> usize {
        self.a.cols()
    }
    fn value(&self, x: &Vector<F>) -> F {
        (0..self.a.rows())
            .map(|i| (self.a.row_dot(i, x) - self.b[i]).abs())
            .sum()
    }
    /// `Σ sign(rᵢ) aᵢ` with `sign(0) = 0`.
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let r = Vector::from_vec(
            (0..self.a.rows())
                .map(|i| sign0(self.a.row_dot(i, x) - self.b[i]))
                .collect(),
        );
        self.a.tmatvec(&r)
    }
}

#[derive(Clone, Debug)]
pub struct Norm2<F> {
    pub a: Vector<F>,
}

impl<F: Scalar> Problem<F> for Norm2<F> {
    fn name(&self) -> &str {
        "norm2"
    }
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn value(&self, x: &Vector<F>) -> F {
        x.dist(&self.a)
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let r = x - &self.a;
        let n = r.norm();
        if n > F::zero() {
            r.scaled(F::one() / n)
        } else {
            Vector::zeros(self.a.dim())
        }
    }
    fn default_start(&self) -> Vector<F> {
        self.a.plus_scaled(F::one(), &Vector::filled(self.a.dim(), F::one()))
    }
}

#[derive(Clone, Debug)]
pub struct QuadDiag<F> {
    lambdas: Vector<F>,
    center: Vector<F>,
    quad: Quadratic<F>,
}

impl<F: Scalar> QuadDiag<F> {
    pub fn new(lambdas: &[f64], center: &[f64]) -> Self {
        let lambdas: Vector<F> = Vector::from_f64(lambdas);
        let center: Vector<F> = Vector::from_f64(center);
        let b = Vector::from_vec(
            lambdas.iter().zip(center.iter()).map(|(&l, &c)| l * c).collect(),
        );
        let c0 = s::<F>(0.5) * b.dot(&center);
        let quad = Quadratic {
            a: Matrix::diag(lambdas.as_slice()),
            b,
            c: c0,
        };
        Self { lambdas, center, quad }
    }
}

impl<F: Scalar> Problem<F> for QuadDiag<F> {
    fn name(&self) -> &str {
        "quad_diag"
    }
    fn dim(&self) -> usize {
        self.lambdas.dim()
    }
    fn value(&self, x: &Vector<F>) -> F {
        let mut acc = F::zero();
        for i in 0..x.dim() {
            let r = x[i] - self.center[i];
            acc += self.lambdas[i] * r * r;
        }
        s::<F>(0.5) * acc
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        Vector::from_vec(
            (0..x.dim())
                .map(|i| self.lambdas[i] * (x[i] - self.center[i]))
                .collect(),
        )
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(self.subgrad(x))
    }
    fn has_grad(&self) -> bool {
        true
    }
    fn quadratic(&self) -> Option<&Quadratic<F>> {
        Some(&self.quad)
    }
    fn default_start(&self) -> Vector<F> {
        self.center.plus_scaled(F::one(), &Vector::filled(self.center.dim(), F::one()))
    }
}

/// `½||x − a||²`
#[derive(Clone, Debug)]
pub struct SqDist<F> {
    a: Vector<F>,
    start: Vector<F>,
    quad: Quadratic<F>,
}

impl<F: Scalar> SqDist<F> {
    pub fn new(a: Vector<F>, start: Vector<F>) -> Self {
        let d = a.dim();
        let quad = Quadratic {
            a: Matrix::diag(&vec![F::one(); d]),
            b: a.clone(),
            c: s::<F>(0.5) * a.norm_sq(),
        };
        Self { a, start, quad }
    }
}

impl<F: Scalar> Problem<F> for SqDist<F> {
    fn name(&self) -> &str {
        "sqdist"
    }
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn value(&self, x: &Vector<F>) -> F {
        s::<F>(0.5) * x.dist_sq(&self.a)
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        x - &self.a
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(x - &self.a)
    }
    fn has_grad(&self) -> bool {
        true
    }
    fn quadratic(&self) -> Option<&Quadratic<F>> {
        Some(&self.quad)
    }
    fn default_start(&self) -> Vector<F> {
        self.start.clone()
    }
}

#[derive(Clone, Debug)]
pub struct FwBox<F> {
    quad: Quadratic<F>,
}

impl<F: Scalar> FwBox<F> {
    fn new() -> Self {
        Self {
            quad: Quadratic {
                a: Matrix::diag(&[s(2.0), s(2.0)]),
                b: Vector::from_f64(&[0.0, -2.0]),
                c: F::one(),
            },
        }
    }
}

impl<F: Scalar> Problem<F> for FwBox<F> {
    fn name(&self) -> &str {
        "fw_box"
    }
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Vector<F>) -> F {
        let t = F::one() + x[1];
        x[0] * x[0] + t * t
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        Vector::from_vec(vec![s::<F>(2.0) * x[0], s::<F>(2.0) * (F::one() + x[1])])
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(self.subgrad(x))
    }
    fn has_grad(&self) -> bool {
        true
    }
    fn quadratic(&self) -> Option<&Quadratic<F>> {
        Some(&self.quad)
    }
    fn default_start(&self) -> Vector<F> {
        Vector::from_f64(&[1.0, 1.0])
    }
}

/// `⟨Ax,x⟩`, `A = diag(a₁, a₂, 0)`. Minimizers form the `x₃` axis.
#[derive(Clone, Debug)]
pub struct Degenerate3<F> {
    a1: F,
    a2: F,
    quad: Quadratic<F>,
}

impl<F: Scalar> Degenerate3<F> {
    fn new(a1: f64, a2: f64) -> Self {
        Self {
            a1: s(a1),
            a2: s(a2),
            quad: Quadratic {
                a: Matrix::diag(&[s(2.0 * a1), s(2.0 * a2), F::zero()]),
                b: Vector::zeros(3),
                c: F::zero(),
            },
        }
    }
}

impl<F: Scalar> Problem<F> for Degenerate3<F> {
    fn name(&self) -> &str {
        "degenerate3"
    }
    fn dim(&self) -> usize {
        3
    }
    fn value(&self, x: &Vector<F>) -> F {
        self.a1 * x[0] * x[0] + self.a2 * x[1] * x[1]
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let two = s::<F>(2.0);
        Vector::from_vec(vec![two * self.a1 * x[0], two * self.a2 * x[1], F::zero()])
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(self.subgrad(x))
    }
    fn has_grad(&self) -> bool {
        true
    }
    fn quadratic(&self) -> Option<&Quadratic<F>> {
        Some(&self.quad)
    }
    fn dist_to_solution(&self, x: &Vector<F>) -> Option<F> {
        Some((x[0] * x[0] + x[1] * x[1]).sqrt())
    }
}

#[derive(Clone, Debug)]
pub struct Rosenbrock;

impl<F: Scalar> Problem<F> for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Vector<F>) -> F {
        let a = F::one() - x[0];
        let b = x[1] - x[0] * x[0];
        a * a + s::<F>(100.0) * b * b
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let b = x[1] - x[0] * x[0];
        Vector::from_vec(vec![
            s::<F>(-2.0) * (F::one() - x[0]) - s::<F>(400.0) * x[0] * b,
            s::<F>(200.0) * b,
        ])
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(<Self as Problem<F>>::subgrad(self, x))
    }
    fn has_grad(&self) -> bool {
        true
    }
    fn default_start(&self) -> Vector<F> {
        Vector::from_f64(&[-1.2, 1.0])
    }
}

/// `½x₁² + ¼x₂⁴ − ½x₂²`: minima at `(0, ±1)`, saddle at the origin.
#[derive(Clone, Debug)]
pub struct NesterovSkokovToy;

impl<F: Scalar> Problem<F> for NesterovSkokovToy {
    fn name(&self) -> &str {
        "nesterov_skokov_toy"
    }
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Vector<F>) -> F {
        let h = s::<F>(0.5);
        let y2 = x[1] * x[1];
        h * x[0] * x[0] + s::<F>(0.25) * y2 * y2 - h * y2
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        Vector::from_vec(vec![x[0], x[1] * x[1] * x[1] - x[1]])
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(<Self as Problem<F>>::subgrad(self, x))
    }
    fn has_grad(&self) -> bool {
        true
    }
    fn dist_to_solution(&self, x: &Vector<F>) -> Option<F> {
        let up = (x[1] - F::one()).abs();
        let down = (x[1] + F::one()).abs();
        Some((x[0] * x[0] + up.min(down).powi(2)).sqrt())
    }
    fn default_start(&self) -> Vector<F> {
        Vector::from_f64(&[1.0, 0.0])
    }
}

/// `(1/m)Σ|⟨aᵢ,x⟩² − bᵢ|`, gaussian `aᵢ`, unit `x*`, `bᵢ = ⟨aᵢ,x*⟩²`.
#[derive(Clone, Debug)]
pub struct PhaseRetrieval<F> {
    pub a: Matrix<F>,
    pub b: Vector<F>,
    pub xstar: Vector<F>,
}

impl<F: Scalar> PhaseRetrieval<F> {
    pub fn generate(m: usize, n: usize, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let rows: Vec<Vector<F>> = (0..m).map(|_| rng.gaussian_vec(n)).collect();
        let a = Matrix::from_rows(&rows);
        let xstar: Vector<F> = rng.sphere(n);
        let b = a.matvec(&xstar).map(|v| v * v);
        Self { a, b, xstar }
    }
}

impl<F: Scalar> Problem<F> for PhaseRetrieval<F> {
    fn name(&self) -> &str {
        "phase_retrieval"
    }
    fn dim(&self) -> usize {
        self.a.cols()
    }
    fn value(&self, x: &Vector<F>) -> F {
        let m = self.a.rows();
        let sum: F = (0..m)
            .map(|i| {
                let t = self.a.row_dot(i, x);
                (t * t - self.b[i]).abs()
            })
            .sum();
        sum / F::from_usize_lossy(m)
    }
    /// `(2/m)Σ sign(⟨aᵢ,x⟩² − bᵢ)⟨aᵢ,x⟩aᵢ` with `sign(0) = 0`.
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let m = self.a.rows();
        let w = Vector::from_vec(
            (0..m)
                .map(|i| {
                    let t = self.a.row_dot(i, x);
                    s::<F>(2.0) * sign0(t * t - self.b[i]) * t
                })
                .collect(),
        );
        self.a.tmatvec(&w).scaled(F::one() / F::from_usize_lossy(m))
    }
    fn dist_to_solution(&self, x: &Vector<F>) -> Option<F> {
        Some(x.dist(&self.xstar).min(x.dist(&-&self.xstar)))
    }
    fn default_start(&self) -> Vector<F> {
        let mut v = self.xstar.clone();
        v[0] += s(0.1);
        v
    }
}

#[derive(Clone, Debug)]
pub struct SlpObjective;

impl<F: Scalar> Problem<F> for SlpObjective {
    fn name(&self) -> &str {
        "slp"
    }
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Vector<F>) -> F {
        -x[0]
    }
    fn subgrad(&self, _x: &Vector<F>) -> Vector<F> {
        Vector::from_vec(vec![-F::one(), F::zero()])
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(<Self as Problem<F>>::subgrad(self, x))
    }
    fn has_grad(&self) -> bool {
        true
    }
    /// Solutions form the segment `{x₁ = 1, |x₂| ≤ tan(π/20)}`.
    fn dist_to_solution(&self, x: &Vector<F>) -> Option<F> {
        let half = (F::PI() / s(20.0)).tan();
        let y = x[1].max(-half).min(half);
        let dx = x[0] - F::one();
        let dy = x[1] - y;
        Some((dx * dx + dy * dy).sqrt())
    }
}

/// `g(x) = maxⱼ ρ(cos(jπ/10)x₁ + sin(jπ/10)x₂ − 1)`, `j = 0..19`.
#[derive(Clone, Debug)]
pub struct SlpConstraint<F> {
    rows: Vec<(F, F)>,
    rho: F,
}

impl<F: Scalar> SlpConstraint<F> {
    pub fn new(rho: f64) -> Self {
        let rows = (0..20)
            .map(|j| {
                let t = j as f64 * std::f64::consts::PI / 10.0;
                // Exact zeros where the angle makes them so.
                let (sn, cs) = match j {
                    0 => (0.0, 1.0),
                    5 => (1.0, 0.0),
                    10 => (0.0, -1.0),
                    15 => (-1.0, 0.0),
                    _ => t.sin_cos(),
                };
                (s(rho * cs), s(rho * sn))
            })
            .collect();
        Self { rows, rho: s(rho) }
    }

    fn active(&self, x: &Vector<F>) -> (usize, F) {
        let mut best = (0, F::neg_infinity());
        for (j, &(c, sn)) in self.rows.iter().enumerate() {
            let v = c * x[0] + sn * x[1] - self.rho;
            if v > best.1 {
                best = (j, v);
            }
        }
        best
    }
}

impl<F: Scalar> Problem<F> for SlpConstraint<F> {
    fn name(&self) -> &str {
        "slp_constraint"
    }
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Vector<F>) -> F {
        self.active(x).1
    }
    /// Gradient of the lowest-index active row.
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let (j, _) = self.active(x);
        Vector::from_vec(vec![self.rows[j].0, self.rows[j].1])
    }
}

/// Mean logistic loss `(1/m)Σ log(1 + exp(−yᵢ⟨aᵢ,x⟩))`.
#[derive(Clone, Debug)]
pub struct Logistic<F> {
    pub a: Matrix<F>,
    pub y: Vector<F>,
}

impl<F: Scalar> Logistic<F> {
    pub fn generate(m: usize, d: usize, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let w: Vector<F> = rng.gaussian_vec(d);
        let rows: Vec<Vector<F>> = (0..m).map(|_| rng.gaussian_vec(d)).collect();
        let y = Vector::from_vec(
            rows.iter()
                .map(|r| {
                    let margin = r.dot(&w).as_f64() + rng.gaussian();
                    if margin >= 0.0 {
                        F::one()
                    } else {
                        -F::one()
                    }
                })
                .collect(),
        );
        Self {
            a: Matrix::from_rows(&rows),
            y,
        }
    }
}

/// `log(1 + eᵗ)` without overflow.
fn softplus<F: Scalar>(t: F) -> F {
    if t > F::zero() {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid<F: Scalar>(t: F) -> F {
    if t >= F::zero() {
        F::one() / (F::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (F::one() + e)
    }
}

impl<F: Scalar> Problem<F> for Logistic<F> {
    fn name(&self) -> &str {
        "logistic_small"
    }
    fn dim(&self) -> usize {
        self.a.cols()
    }
    fn value(&self, x: &Vector<F>) -> F {
        let m = self.a.rows();
        let sum: F = (0..m).map(|i| softplus(-self.y[i] * self.a.row_dot(i, x))).sum();
        sum / F::from_usize_lossy(m)
    }
    fn subgrad(&self, x: &Vector<F>) -> Vector<F> {
        let m = self.a.rows();
        let w = Vector::from_vec(
            (0..m)
                .map(|i| -self.y[i] * sigmoid(-self.y[i] * self.a.row_dot(i, x)))
                .collect(),
        );
        self.a.tmatvec(&w).scaled(F::one() / F::from_usize_lossy(m))
    }
    fn grad(&self, x: &Vector<F>) -> Option<Vector<F>> {
        Some(self.subgrad(x))
    }
    fn has_grad(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs1d_constants() {
        let (s, set) = make_problem::<f64>("abs1d", &Params::new(), 0).unwrap();
        assert_eq!(s.fstar, Some(0.0));
        assert_eq!(s.xstar, Some(Vector::from_f64(&[0.0])));
        assert_eq!(s.constants.m, Some(1.0));
        assert_eq!(s.constants.alpha_sharp, Some(1.0));
        assert!(!set.is_bounded());
    }

    #[test]
    fn quad_diag_constants() {
        let p = Params::new().with("lambdas", vec![10.0, 1.0]);
        let (s, _) = make_problem::<f64>("quad_diag", &p, 0).unwrap();
        assert_eq!(s.constants.l, Some(10.0));
        assert_eq!(s.constants.mu, Some(1.0));
        assert_eq!(s.fstar, Some(0.0));
    }

    #[test]
    fn slp_solution() {
        let p = Params::new().with("rho", 1.0);
        let (mut s, _) = make_problem::<f64>("slp", &p, 0).unwrap();
        assert_eq!(s.fstar, Some(-1.0));
        assert_eq!(s.xstar, Some(Vector::from_f64(&[1.0, 0.0])));
        let xs = Vector::from_f64(&[1.0, 0.0]);
        assert!(s.constraint_value(&xs).unwrap().abs() < 1e-15);
        assert_eq!(s.constraint_subgrad(&xs).unwrap(), Vector::from_f64(&[1.0, 0.0]));
        // The whole edge x1 = 1, |x2| ≤ tan 9° is optimal.
        let edge = Vector::from_f64(&[1.0, (std::f64::consts::PI / 20.0).tan()]);
        assert!(s.constraint_value(&edge).unwrap() <= 1e-15);
        assert!(s.dist_to_opt(&edge).unwrap() < 1e-15);
    }

    #[test]
    fn unknown_name_and_params() {
        assert!(matches!(
            make_problem::<f64>("nope", &Params::new(), 0),
            Err(OptError::UnknownProblem(_))
        ));
        let p = Params::new().with("lambda", vec![1.0]);
        assert!(matches!(
            make_problem::<f64>("quad_diag", &p, 0),
            Err(OptError::InvalidParam { .. })
        ));
        let p = Params::new().with("lambdas", vec![1.0, -1.0]);
        assert!(make_problem::<f64>("quad_diag", &p, 0).is_err());
    }

    #[test]
    fn every_catalog_entry_builds_in_both_precisions() {
        for (name, _) in CATALOG {
            let (s64, set64) = make_problem::<f64>(name, &Params::new(), 3).unwrap();
            let (s32, _) = make_problem::<f32>(name, &Params::new(), 3).unwrap();
            let x0 = s64.default_start();
            assert_eq!(x0.dim(), s64.dim(), "{name}");
            assert_eq!(set64.dim(), s64.dim(), "{name}");
            assert_eq!(s32.dim(), s64.dim(), "{name}");
            assert!(s64.true_value(&x0).is_finite(), "{name}");
            if let (Some(fs), Some(xs)) = (s64.fstar, s64.xstar.as_ref()) {
                assert!((s64.true_value(xs) - fs).abs() < 1e-12, "{name}");
            }
        }
    }
}
