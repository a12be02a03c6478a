use std::fmt;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bidiag::{gkb, Reorthogonalization};
use crate::evaluate::{exact_u, manufactured_source, ManufacturedCase};
use crate::kernel::{mq_laplacian3d, mq_value, KernelParams};
use crate::regularize::{
    hkt_solve, ine_tsvd, svd, tikhonov_filter_solve, tsvd_solve, LambdaGrid, ParameterRule,
    Truncation,
};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationLevel {
    Fast,
    Full,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

const FD_STEP: f64 = 1e-4;

/// Seven-point finite-difference Laplacian.
fn fd_laplacian(u: impl Fn(&Vec3) -> f64, x: &Vec3, h: f64) -> f64 {
    let mut acc = -6.0 * u(x);
    for d in 0..3 {
        let mut e = Vec3::zeros();
        e[d] = h;
        acc += u(&(x + e)) + u(&(x - e));
    }
    acc / (h * h)
}

/// Largest relative deviation of `lap(r, p)` from the finite-difference
/// Laplacian of `mq_value(‖x‖)` over `n` random points in `[-2,2]³` and
/// ε in `[0.5, 3]`. Takes the Laplacian as a parameter so that a corrupted
/// kernel can be checked.
pub fn check_laplacian_fd(lap: impl Fn(f64, KernelParams) -> f64, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x = Vec3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let p = KernelParams::new(rng.random_range(0.5..3.0)).unwrap();
        let fd = fd_laplacian(|y| mq_value(y.norm(), p), &x, FD_STEP);
        let exact = lap(x.norm(), p);
        worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    worst
}

/// Largest relative deviation of `manufactured_source` from
/// `Δ_h u + k²u` over `n` random points near the case center.
pub fn check_source_fd(case: &ManufacturedCase, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k2 = case.wavenumber().powi(2);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x = case.center
            + Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
        let fd = fd_laplacian(|y| exact_u(case, y), &x, FD_STEP) + k2 * exact_u(case, &x);
        let exact = manufactured_source(case, &x);
        worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    worst
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// `U diag(σ) Vᵀ` with random orthogonal factors.
fn with_spectrum(rng: &mut ChaCha8Rng, sigma: &[f64]) -> DMatrix<f64> {
    let n = sigma.len();
    let u = random_matrix(rng, n, n).qr().q();
    let v = random_matrix(rng, n, n).qr().q();
    u * DMatrix::from_diagonal(&DVector::from_column_slice(sigma)) * v.transpose()
}

fn rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn check(name: &'static str, value: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: value <= tol,
        detail: format!("max deviation {value:.3e} (tolerance {tol:.0e})"),
    }
}

fn gkb_identities(level: ValidationLevel, rng: &mut ChaCha8Rng) -> CheckResult {
    let (count, n, ell) = match level {
        ValidationLevel::Fast => (5, 60, 20),
        ValidationLevel::Full => (20, 100, 30),
    };
    let mut worst = 0.0f64;
    for _ in 0..count {
        let a = random_matrix(rng, n, n);
        let f = random_vector(rng, n);
        let g = match gkb(&a, &f, ell, Reorthogonalization::Full) {
            Ok(g) => g,
            Err(e) => {
                return CheckResult {
                    name: "gkb identities",
                    passed: false,
                    detail: e.to_string(),
                }
            }
        };
        let an = a.norm();
        let k = g.steps_completed;
        let w = g.w.columns(0, k + 1);
        let c = &g.c;
        let d1 = (&a * &g.z - w * c).norm() / an;
        let d2 = (a.transpose() * w.columns(0, k) - &g.z * c.rows(0, k).transpose()).norm() / an;
        let d3 = (w.transpose() * w - DMatrix::identity(k + 1, k + 1)).norm();
        let d4 = (g.z.transpose() * &g.z - DMatrix::identity(k, k)).norm();
        worst = worst.max(d1).max(d2).max(d3).max(d4);
    }
    check("gkb identities", worst, 1e-10)
}

/// `cᵀBc` on zero-sum vectors. For MQ the form is strictly negative there
/// (ψ' completely monotone), which is what makes the bordered interpolation
/// system nonsingular.
fn conditional_definiteness(level: ValidationLevel, rng: &mut ChaCha8Rng) -> CheckResult {
    let (sets, vecs) = match level {
        ValidationLevel::Fast => (2, 50),
        ValidationLevel::Full => (5, 200),
    };
    let mut largest = f64::NEG_INFINITY;
    for _ in 0..sets {
        let pts: Vec<Vec3> = (0..50)
            .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        for eps in [0.5, 1.0, 2.0] {
            let p = KernelParams::new(eps).unwrap();
            let b = DMatrix::from_fn(50, 50, |i, j| mq_value((pts[i] - pts[j]).norm(), p));
            for _ in 0..vecs {
                let mut c = random_vector(rng, 50);
                let mean = c.mean();
                c.add_scalar_mut(-mean);
                c /= c.norm();
                largest = largest.max(c.dot(&(&b * &c)));
            }
        }
    }
    CheckResult {
        name: "conditional definiteness (order 1)",
        passed: largest < 0.0,
        detail: format!("max cᵀBc over unit zero-sum c: {largest:.3e} (must be < 0)"),
    }
}

fn filter_bounds(rng: &mut ChaCha8Rng) -> CheckResult {
    let n = 30;
    let sigma: Vec<f64> = (0..n).map(|i| 10f64.powf(-(i as f64) / 3.0)).collect();
    let a = with_spectrum(rng, &sigma);
    let f = random_vector(rng, n);
    let data = svd(&a).and_then(|s| s.project(&f));
    let data = match data {
        Ok(d) => d,
        Err(e) => {
            return CheckResult {
                name: "filter bounds and monotonicity",
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let grid = LambdaGrid::default().values(data.sigma[0]);
    let mut ok = true;
    let mut prev: Option<(f64, f64)> = None;
    for &l in &grid {
        ok &= data.filter_factors(l).iter().all(|&p| (0.0..=1.0).contains(&p));
        let (r, e) = (data.residual_sq(l), data.solution_norm_sq(l));
        if let Some((pr, pe)) = prev {
            ok &= r >= pr * (1.0 - 1e-12) && e <= pe * (1.0 + 1e-12);
        }
        prev = Some((r, e));
    }
    CheckResult {
        name: "filter bounds and monotonicity",
        passed: ok,
        detail: format!("{} λ values checked", grid.len()),
    }
}

fn tikhonov_normal_equations(rng: &mut ChaCha8Rng) -> CheckResult {
    let n = 20;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let sigma: Vec<f64> = (0..n).map(|i| 10f64.powf(-6.0 * i as f64 / (n - 1) as f64)).collect();
        let a = with_spectrum(rng, &sigma);
        let f = random_vector(rng, n);
        let s = svd(&a).unwrap();
        for m in [1e-3, 1.0, 10.0] {
            let l = m * s.sigma[0];
            let x = tikhonov_filter_solve(&s, &f, l).unwrap().alpha;
            let lhs = a.tr_mul(&a) + DMatrix::identity(n, n) * (l * l);
            let y = lhs.cholesky().unwrap().solve(&a.tr_mul(&f));
            worst = worst.max(rel(&x, &y));
        }
    }
    check("tikhonov filter ≡ normal equations", worst, 1e-8)
}

/// `‖(I−H)f‖² / tr(I−H)²` with the explicit hat matrix `H = Q₁Q₁ᵀ` from the
/// QR factorization of the stacked `[A; λI]`; `tr(I−H) = ‖Q₂‖_F²`.
fn hat_matrix_gcv(a: &DMatrix<f64>, f: &DVector<f64>, lambda: f64) -> f64 {
    let (m, n) = a.shape();
    let mut stacked = DMatrix::zeros(m + n, n);
    stacked.view_mut((0, 0), (m, n)).copy_from(a);
    stacked.view_mut((m, 0), (n, n)).fill_diagonal(lambda);
    let q = stacked.qr().q();
    let q1 = q.rows(0, m);
    let h = &q1 * q1.transpose();
    let r = f - &h * f;
    let tr = (m - n) as f64 + q.rows(m, n).norm_squared();
    r.norm_squared() / (tr * tr)
}

fn gcv_hat_matrix(rng: &mut ChaCha8Rng) -> CheckResult {
    let n = 8;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = random_matrix(rng, n, n);
        let f = random_vector(rng, n);
        let s = svd(&a).unwrap();
        let data = s.project(&f).unwrap();
        for i in 0..20 {
            let l = s.sigma[0] * 10f64.powf(-3.0 + 4.0 * i as f64 / 19.0);
            let oracle = hat_matrix_gcv(&a, &f, l);
            let g = data.gcv(l).unwrap_or(f64::NAN);
            worst = worst.max(((g - oracle) / oracle).abs());
        }
    }
    check("gcv ≡ hat-matrix oracle", worst, 1e-10)
}

fn projected_equivalences(rng: &mut ChaCha8Rng) -> CheckResult {
    let n = 40;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = random_matrix(rng, n, n);
        let f = random_vector(rng, n);
        let s = svd(&a).unwrap();
        for k in [1, 5, 10, 20] {
            let x = ine_tsvd(&a, &f, n, Truncation::Fixed(k)).unwrap().alpha;
            let y = tsvd_solve(&s, &f, k).unwrap().alpha;
            worst = worst.max(rel(&x, &y));
        }
        let h = hkt_solve(&a, &f, n, ParameterRule::Gcv, &LambdaGrid::default()).unwrap();
        let y = tikhonov_filter_solve(&s, &f, h.param.value()).unwrap().alpha;
        worst = worst.max(rel(&h.alpha, &y));
    }
    check("full-projection limits (ine_tsvd, hkt)", worst, 1e-8)
}

/// Runs the invariant suites. `Fast` stays well under a minute; `Full` uses
/// the acceptance-sized instances.
pub fn run_validation(level: ValidationLevel) -> ValidationReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20140101);
    let mut checks = vec![
        check("mq laplacian vs finite differences", check_laplacian_fd(mq_laplacian3d, 100, 1), 1e-5),
        check(
            "manufactured sources vs finite differences",
            [
                ManufacturedCase::cube(3.0),
                ManufacturedCase::sphere(3.0),
                ManufacturedCase::pump(3.0),
            ]
            .iter()
            .map(|c| check_source_fd(c, 50, 2))
            .fold(0.0, f64::max),
            1e-5,
        ),
    ];
    checks.push(gkb_identities(level, &mut rng));
    checks.push(conditional_definiteness(level, &mut rng));
    checks.push(filter_bounds(&mut rng));
    checks.push(tikhonov_normal_equations(&mut rng));
    checks.push(gcv_hat_matrix(&mut rng));
    checks.push(projected_equivalences(&mut rng));
    log::info!("validation finished in {:.2?}", start.elapsed());
    ValidationReport { checks }
}
