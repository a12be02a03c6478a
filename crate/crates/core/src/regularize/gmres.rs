//! Arnoldi–Tikhonov, the Tikhonov-regularized GMRES baseline.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::hybrid::tikhonov_on_surrogate;
use super::{svd, LambdaGrid, Method, ParameterRule, SolveReport};
use crate::bidiag::default_breakdown_factor;
use crate::linop::LinearOperator;
use crate::{Error, Result};

/// `A V_m = V_{m+1} H̄_m` with `V` column-orthonormal and `H̄` upper
/// Hessenberg, `(m+1)×m`.
#[derive(Debug, Clone)]
pub struct ArnoldiFactorization {
    /// N×(steps+1); the last column is zero after a breakdown.
    pub v: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub beta: f64,
    pub steps_completed: usize,
    pub breakdown: bool,
}

/// `m` Arnoldi steps from `f/‖f‖` with (twice-applied) modified Gram–Schmidt.
pub fn arnoldi<A: LinearOperator + ?Sized>(
    a: &A,
    f: &DVector<f64>,
    m: usize,
) -> Result<ArnoldiFactorization> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension("Arnoldi needs a square operator".into()));
    }
    if f.len() != n {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, operator has {n} rows",
            f.len()
        )));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "Krylov dimension must be in 1..={n}, got {m}"
        )));
    }
    let beta = f.norm();
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(
            "Arnoldi needs a nonzero, finite right-hand side".into(),
        ));
    }
    let tol = default_breakdown_factor(n) * a.norm_estimate();
    let mut vs = vec![f / beta];
    let mut h = DMatrix::zeros(m + 1, m);
    let mut w = DVector::zeros(n);
    let mut breakdown = false;
    let mut steps = 0;
    for j in 0..m {
        a.apply(&vs[j], &mut w);
        for _ in 0..2 {
            for (i, q) in vs.iter().enumerate() {
                let c = q.dot(&w);
                h[(i, j)] += c;
                w.axpy(-c, q, 1.0);
            }
        }
        let hn = w.norm();
        h[(j + 1, j)] = hn;
        steps = j + 1;
        if hn < tol {
            vs.push(DVector::zeros(n));
            breakdown = true;
            break;
        }
        vs.push(&w / hn);
    }
    Ok(ArnoldiFactorization {
        v: DMatrix::from_columns(&vs),
        h: h.view((0, 0), (steps + 1, steps)).into_owned(),
        beta,
        steps_completed: steps,
        breakdown,
    })
}

/// Residual norms and (given a reference) relative errors of the plain GMRES
/// iterates `x_j = V_j y_j`, `y_j = argmin ‖H̄_j y − β e₁‖`, for every
/// `j ≤ steps`. Uses Givens rotations on `H̄`.
fn gmres_traces(
    fact: &ArnoldiFactorization,
    reference: Option<&DVector<f64>>,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let m = fact.steps_completed;
    let mut r = fact.h.clone();
    let mut g = DVector::zeros(m + 1);
    g[0] = fact.beta;
    let mut residuals = Vec::with_capacity(m);
    let mut errors = reference.map(|_| Vec::with_capacity(m));
    let mut cs: Vec<(f64, f64)> = Vec::with_capacity(m);
    for j in 0..m {
        for (i, &(c, s)) in cs.iter().enumerate() {
            let (a, b) = (r[(i, j)], r[(i + 1, j)]);
            r[(i, j)] = c * a + s * b;
            r[(i + 1, j)] = -s * a + c * b;
        }
        let (a, b) = (r[(j, j)], r[(j + 1, j)]);
        let d = a.hypot(b);
        let (c, s) = if d == 0.0 { (1.0, 0.0) } else { (a / d, b / d) };
        r[(j, j)] = d;
        r[(j + 1, j)] = 0.0;
        let (ga, gb) = (g[j], g[j + 1]);
        g[j] = c * ga + s * gb;
        g[j + 1] = -s * ga + c * gb;
        cs.push((c, s));
        residuals.push(g[j + 1].abs());

        if let (Some(errs), Some(x_ref)) = (errors.as_mut(), reference) {
            let k = j + 1;
            let mut y = DVector::zeros(k);
            for i in (0..k).rev() {
                let mut acc = g[i];
                for l in i + 1..k {
                    acc -= r[(i, l)] * y[l];
                }
                y[i] = if r[(i, i)] != 0.0 { acc / r[(i, i)] } else { 0.0 };
            }
            let x = fact.v.columns(0, k) * y;
            errs.push((x - x_ref).norm() / x_ref.norm());
        }
    }
    (residuals, errors)
}

/// Tikhonov-regularized GMRES: `m` Arnoldi steps, Tikhonov on the projected
/// problem `min ‖H̄_m y − β e₁‖² + λ²‖y‖²` with λ by GCV on the surrogate,
/// `α = V_m y`.
///
/// The report also carries the residual trace of the unregularized GMRES
/// iterates and, when `reference` is given, their relative error against it,
/// which exposes semi-convergence.
pub fn reg_gmres<A: LinearOperator + ?Sized>(
    a: &A,
    f: &DVector<f64>,
    m: usize,
    grid: &LambdaGrid,
    reference: Option<&DVector<f64>>,
) -> Result<SolveReport> {
    let start = Instant::now();
    let fact = arnoldi(a, f, m)?;
    let k = fact.steps_completed;
    let h_svd = svd(&fact.h)?;
    if h_svd.rank() == 0 {
        return Err(Error::Solver("Hessenberg matrix has rank zero".into()));
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[0] = fact.beta;
    let data = h_svd.project(&rhs)?;
    let (mut report, coords) =
        tikhonov_on_surrogate(&data, grid, ParameterRule::Gcv, Method::RegGmres)?;
    report.alpha = fact.v.columns(0, k) * h_svd.lift(&coords);
    report.iterations = k;
    let (residuals, errors) = gmres_traces(&fact, reference);
    report.residual_trace = Some(residuals);
    report.error_trace = errors;
    report.wall_time = start.elapsed();
    Ok(report)
}
