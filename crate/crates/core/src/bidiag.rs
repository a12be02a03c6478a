//! Golub–Kahan (Lanczos) bidiagonalization.
//!
//! After `ℓ` steps the factorization satisfies `A Z = W C` and `Aᵀ W = Z Cᵀ`,
//! with `W` (N×(ℓ+1)) and `Z` (N×ℓ) column-orthonormal and `C` lower
//! bidiagonal, `diag(C) = (α₁..α_ℓ)`, `subdiag(C) = (β₂..β_{ℓ+1})`. The first
//! column of `W` is `f/‖f‖₂`, so `Wᵀ f = β₁ e₁`.

use nalgebra::{DMatrix, DVector};

use crate::linop::LinearOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reorthogonalization {
    None,
    #[default]
    Full,
}

/// Which recurrence coefficient fell below the breakdown tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakdownKind {
    /// `α_j` vanished: `z_j` could not be formed, the run keeps `j − 1` steps.
    Alpha,
    /// `β_{j+1}` vanished: step `j` is complete and `w_{j+1}` is set to zero.
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Breakdown {
    /// 1-based step at which the small coefficient appeared.
    pub step: usize,
    pub kind: BreakdownKind,
}

#[derive(Debug, Clone)]
pub struct GkbFactorization {
    /// N×(steps+1)
    pub w: DMatrix<f64>,
    /// N×steps
    pub z: DMatrix<f64>,
    /// (steps+1)×steps lower bidiagonal.
    pub c: DMatrix<f64>,
    pub beta1: f64,
    pub steps_completed: usize,
    pub breakdown: Option<Breakdown>,
}

impl GkbFactorization {
    pub fn alphas(&self) -> Vec<f64> {
        (0..self.steps_completed).map(|j| self.c[(j, j)]).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        (0..self.steps_completed).map(|j| self.c[(j + 1, j)]).collect()
    }
}

/// Default breakdown threshold relative to `‖A‖_F`: `max(M,N)·ε_mach`, the
/// same scale as the numerical-rank cutoff. Step quantities above it still
/// carry information the solvers use.
pub fn default_breakdown_factor(dim: usize) -> f64 {
    dim.max(1) as f64 * f64::EPSILON
}

/// `steps` steps of Golub–Kahan bidiagonalization started from `f`, with the
/// default breakdown tolerance `√ε_mach · ‖A‖`.
pub fn gkb<A: LinearOperator + ?Sized>(
    a: &A,
    f: &DVector<f64>,
    steps: usize,
    reorth: Reorthogonalization,
) -> Result<GkbFactorization> {
    let dim = a.nrows().max(a.ncols());
    gkb_with_tolerance(a, f, steps, reorth, default_breakdown_factor(dim))
}

/// As [`gkb`], stopping once `α_j` or `β_{j+1}` drops below
/// `breakdown_factor · ‖A‖`.
pub fn gkb_with_tolerance<A: LinearOperator + ?Sized>(
    a: &A,
    f: &DVector<f64>,
    steps: usize,
    reorth: Reorthogonalization,
    breakdown_factor: f64,
) -> Result<GkbFactorization> {
    let (m, n) = (a.nrows(), a.ncols());
    if f.len() != m {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, operator has {m} rows",
            f.len()
        )));
    }
    if steps == 0 || steps > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "GKB steps must be in 1..={}, got {steps}",
            m.min(n)
        )));
    }
    let beta1 = f.norm();
    if !(beta1 > 0.0) || !beta1.is_finite() {
        return Err(Error::InvalidParameter(
            "GKB needs a nonzero, finite right-hand side".into(),
        ));
    }
    let tol = breakdown_factor * a.norm_estimate();

    let mut ws: Vec<DVector<f64>> = vec![f / beta1];
    let mut zs: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut breakdown = None;

    let mut r = DVector::zeros(n);
    let mut p = DVector::zeros(m);
    for j in 1..=steps {
        a.apply_transpose(&ws[j - 1], &mut r);
        if let (Some(z_prev), Some(&beta_j)) = (zs.last(), betas.last()) {
            r.axpy(-beta_j, z_prev, 1.0);
        }
        if reorth == Reorthogonalization::Full {
            orthogonalize(&mut r, &zs);
        }
        let alpha = r.norm();
        if alpha < tol {
            breakdown = Some(Breakdown {
                step: j,
                kind: BreakdownKind::Alpha,
            });
            break;
        }
        let z = &r / alpha;

        a.apply(&z, &mut p);
        p.axpy(-alpha, &ws[j - 1], 1.0);
        if reorth == Reorthogonalization::Full {
            orthogonalize(&mut p, &ws);
        }
        let beta = p.norm();
        alphas.push(alpha);
        zs.push(z);
        betas.push(beta);
        if beta < tol {
            ws.push(DVector::zeros(m));
            breakdown = Some(Breakdown {
                step: j,
                kind: BreakdownKind::Beta,
            });
            break;
        }
        ws.push(&p / beta);
    }

    let s = zs.len();
    // An α breakdown leaves one more w than z; keep W with s+1 columns.
    ws.truncate(s + 1);
    let mut c = DMatrix::zeros(s + 1, s);
    for j in 0..s {
        c[(j, j)] = alphas[j];
        c[(j + 1, j)] = betas[j];
    }
    Ok(GkbFactorization {
        w: DMatrix::from_columns(&ws),
        z: if s == 0 {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&zs)
        },
        c,
        beta1,
        steps_completed: s,
        breakdown,
    })
}

/// Two passes of modified Gram–Schmidt against an orthonormal basis.
pub(crate) fn orthogonalize(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let h = q.dot(v);
            v.axpy(-h, q, 1.0);
        }
    }
}
