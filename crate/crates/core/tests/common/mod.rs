#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    random_matrix(rng, n, n).qr().q()
}

/// `U diag(σ) Vᵀ` with random orthogonal `U`, `V`.
pub fn with_spectrum(rng: &mut ChaCha8Rng, sigma: &[f64]) -> DMatrix<f64> {
    let n = sigma.len();
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    u * DMatrix::from_diagonal(&DVector::from_column_slice(sigma)) * v.transpose()
}

/// Log-spaced singular values from 1 down to `1/kappa`.
pub fn log_spectrum(n: usize, kappa: f64) -> Vec<f64> {
    (0..n)
        .map(|i| kappa.powf(-(i as f64) / (n - 1).max(1) as f64))
        .collect()
}

/// An ill-posed test problem `A x = b + e`.
pub struct Synthetic {
    pub a: DMatrix<f64>,
    pub x_true: DVector<f64>,
    pub b_exact: DVector<f64>,
    pub b: DVector<f64>,
}

/// Square problem with singular values `sigma` and coefficients satisfying
/// the discrete Picard condition `|u_iᵀb| = σ_i^{1+ν}` (ν = 0.5), plus white
/// noise of relative 2-norm `noise`. With `symmetric`, `U = V`.
pub fn picard_problem(rng: &mut ChaCha8Rng, sigma: &[f64], noise: f64, symmetric: bool) -> Synthetic {
    let n = sigma.len();
    let u = random_orthogonal(rng, n);
    let v = if symmetric { u.clone() } else { random_orthogonal(rng, n) };
    let a = &u * DMatrix::from_diagonal(&DVector::from_column_slice(sigma)) * v.transpose();
    let coeff = DVector::from_fn(n, |i, _| {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign * sigma[i].powf(0.5)
    });
    let x_true = &v * coeff;
    let b_exact = &a * &x_true;
    let e = random_vector(rng, n);
    let scale = noise * b_exact.norm() / e.norm().max(f64::MIN_POSITIVE);
    let b = &b_exact + e * scale;
    Synthetic { a, x_true, b_exact, b }
}

pub fn rel_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// `‖(I−H)f‖² / tr(I−H)²` with `H = Q₁Q₁ᵀ` from the QR factorization of
/// `[A; λI]`.
pub fn hat_matrix_gcv(a: &DMatrix<f64>, f: &DVector<f64>, lambda: f64) -> f64 {
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

/// `(AᵀA + λ²I)⁻¹Aᵀf` by Cholesky.
pub fn normal_equations(a: &DMatrix<f64>, f: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let n = a.ncols();
    (a.tr_mul(a) + DMatrix::identity(n, n) * (lambda * lambda))
        .cholesky()
        .expect("normal matrix is SPD")
        .solve(&a.tr_mul(f))
}
