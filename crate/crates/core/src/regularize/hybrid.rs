use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::lcurve::lcurve_corner;
use super::spectral::SpectralData;
use super::{svd, LambdaGrid, Method, Param, ParameterRule, SolveReport, SvdFactors};
use crate::bidiag::{gkb, GkbFactorization, Reorthogonalization};
use crate::linop::LinearOperator;
use crate::{Error, Result};

/// A least-squares problem projected onto a Golub–Kahan subspace: the
/// factorization, the SVD of the bidiagonal `C_ℓ` and the coordinates of
/// `β₁e₁` in its left singular basis.
#[derive(Debug, Clone)]
pub struct ProjectedProblem {
    pub gkb: GkbFactorization,
    pub c_svd: SvdFactors,
    /// Spectral data of the surrogate; `dim = steps + 1`.
    pub data: SpectralData,
}

impl ProjectedProblem {
    pub fn new<A: LinearOperator + ?Sized>(a: &A, f: &DVector<f64>, ell: usize) -> Result<Self> {
        let gkb = gkb(a, f, ell, Reorthogonalization::Full)?;
        Self::from_factorization(gkb)
    }

    pub fn from_factorization(gkb: GkbFactorization) -> Result<Self> {
        if gkb.steps_completed == 0 {
            return Err(Error::Solver(
                "Golub–Kahan bidiagonalization broke down at the first step".into(),
            ));
        }
        let c_svd = svd(&gkb.c)?;
        if c_svd.rank() == 0 {
            return Err(Error::Solver("projected matrix has rank zero".into()));
        }
        let mut rhs = DVector::zeros(gkb.c.nrows());
        rhs[0] = gkb.beta1;
        let data = c_svd.project(&rhs)?;
        Ok(Self { gkb, c_svd, data })
    }

    pub fn steps(&self) -> usize {
        self.gkb.steps_completed
    }

    /// `Z_ℓ Ṽ c` for coordinates `c` in the right singular basis of `C_ℓ`.
    pub fn lift(&self, coords: &[f64]) -> DVector<f64> {
        &self.gkb.z * self.c_svd.lift(coords)
    }

    /// Coefficients of the projected Tikhonov solution at a given λ.
    pub fn tikhonov(&self, lambda: f64) -> DVector<f64> {
        self.lift(&self.data.tikhonov_coords(lambda))
    }
}

/// Picks λ on `data` over `grid` by the given rule; fills the report traces.
fn choose_lambda(
    data: &SpectralData,
    grid: &[f64],
    rule: ParameterRule,
) -> Result<(f64, Option<Vec<(f64, f64)>>, Option<Vec<(f64, f64, f64)>>)> {
    match rule {
        ParameterRule::Gcv => {
            let (l, trace) = data.select_gcv(grid)?;
            Ok((l, Some(trace), None))
        }
        ParameterRule::Lcurve => {
            let samples: Vec<(f64, f64, f64)> = data
                .lcurve_samples(grid)
                .into_iter()
                .filter(|&(_, r, e)| r > 0.0 && e > 0.0)
                .collect();
            let corner = lcurve_corner(&samples)?;
            if corner.low_confidence {
                log::warn!("L-curve corner at λ = {:e} is not pronounced", corner.lambda);
            }
            let trace = samples
                .iter()
                .map(|&(l, r, e)| (l, r.ln(), e.ln()))
                .collect();
            Ok((corner.lambda, None, Some(trace)))
        }
    }
}

pub(crate) fn tikhonov_on_surrogate(
    data: &SpectralData,
    grid: &LambdaGrid,
    rule: ParameterRule,
    method: Method,
) -> Result<(SolveReport, Vec<f64>)> {
    grid.validate()?;
    let lambdas = grid.values(data.sigma[0]);
    let (lambda, gcv_trace, lcurve_trace) = choose_lambda(data, &lambdas, rule)?;
    let coords = data.tikhonov_coords(lambda);
    let mut report = SolveReport::new(
        DVector::zeros(0),
        method,
        Param::Lambda(lambda),
        data.residual_sq(lambda).sqrt(),
        data.solution_norm_sq(lambda).sqrt(),
    );
    report.gcv_trace = gcv_trace;
    report.lcurve_trace = lcurve_trace;
    Ok((report, coords))
}

/// Hybrid Krylov–Tikhonov: `ℓ` Golub–Kahan steps, λ chosen on the
/// `(ℓ+1)×ℓ` surrogate by GCV or the L-curve, then `α = Z_ℓ y_λ`.
///
/// `y_λ` solves `(C_ℓᵀC_ℓ + λ²I) y = C_ℓᵀ(β₁e₁)`; it is evaluated through the
/// SVD of `C_ℓ` as `Ṽ diag(σ̃_i/(σ̃_i²+λ²)) f̃`, which is the same vector
/// without squaring the condition number of `C_ℓ`.
pub fn hkt_solve<A: LinearOperator + ?Sized>(
    a: &A,
    f: &DVector<f64>,
    ell: usize,
    rule: ParameterRule,
    grid: &LambdaGrid,
) -> Result<SolveReport> {
    let start = Instant::now();
    let proj = ProjectedProblem::new(a, f, ell)?;
    let (mut report, coords) = tikhonov_on_surrogate(&proj.data, grid, rule, Method::Hkt)?;
    report.alpha = proj.lift(&coords);
    report.iterations = proj.steps();
    report.breakdown = proj.gkb.breakdown;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Classical Tikhonov: full SVD of `A`, λ by GCV (or L-curve) on the full
/// spectrum, filtered SVD solution.
pub fn tikh_rg_solve(
    a: &DMatrix<f64>,
    f: &DVector<f64>,
    rule: ParameterRule,
    grid: &LambdaGrid,
) -> Result<SolveReport> {
    let start = Instant::now();
    let s = svd(a)?;
    if s.rank() == 0 {
        return Err(Error::Solver("matrix has numerical rank zero".into()));
    }
    let data = s.project(f)?;
    let (mut report, coords) = tikhonov_on_surrogate(&data, grid, rule, Method::TikhRg)?;
    report.alpha = s.lift(&coords);
    report.wall_time = start.elapsed();
    Ok(report)
}
