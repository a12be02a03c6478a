//! Spectral-filter solvers for ill-posed dense systems and their parameter
//! choice rules.
//!
//! Everything here works from singular triplets: the full SVD of `A` for
//! TSVD and classical Tikhonov, or the SVD of a small projected matrix (the
//! Golub–Kahan bidiagonal `C_ℓ` or the Arnoldi Hessenberg `H̄_m`) for the
//! Krylov variants. [`SpectralData`] holds the `{σ_i, f̂_i}` that every filter,
//! residual norm, solution norm and GCV value is computed from.

mod gmres;
mod hybrid;
mod lcurve;
mod spectral;
mod svd;
mod tsvd;

use std::time::Duration;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bidiag::Breakdown;

pub use gmres::{arnoldi, reg_gmres, ArnoldiFactorization};
pub use hybrid::{hkt_solve, tikh_rg_solve, ProjectedProblem};
pub use lcurve::{lcurve_corner, LcurveCorner};
pub use spectral::{gcv_value, select_lambda_gcv, tikhonov_filter_solve, SpectralData};
pub use svd::{svd, SvdFactors};
pub use tsvd::{ine_tsvd, rank_rule_gcv, tsvd_solve, Truncation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical Tikhonov on the full SVD.
    TikhRg,
    /// Truncated SVD on the full SVD.
    Tsvd,
    /// TSVD on a Golub–Kahan projection.
    IneTsvd,
    /// Hybrid Krylov–Tikhonov on a Golub–Kahan projection.
    Hkt,
    /// Arnoldi–Tikhonov (Tikhonov-regularized GMRES).
    RegGmres,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::TikhRg => "tikh_rg",
            Method::Tsvd => "tsvd",
            Method::IneTsvd => "ine_tsvd",
            Method::Hkt => "hkt",
            Method::RegGmres => "reg_gmres",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "tikh_rg" => Ok(Method::TikhRg),
            "tsvd" => Ok(Method::Tsvd),
            "ine_tsvd" => Ok(Method::IneTsvd),
            "hkt" => Ok(Method::Hkt),
            "reg_gmres" => Ok(Method::RegGmres),
            _ => Err(crate::Error::InvalidParameter(format!("unknown method `{s}`"))),
        }
    }
}

/// Rule for choosing the Tikhonov parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParameterRule {
    #[default]
    Gcv,
    Lcurve,
}

/// The regularization parameter a solver settled on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Lambda(f64),
    Rank(usize),
}

impl Param {
    pub fn value(&self) -> f64 {
        match *self {
            Param::Lambda(l) => l,
            Param::Rank(k) => k as f64,
        }
    }
}

/// Log-spaced λ grid, scaled by the largest singular value of whatever
/// operator it is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaGrid {
    pub min_factor: f64,
    pub max_factor: f64,
    pub count: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            min_factor: 1e-14,
            max_factor: 1.0,
            count: 60,
        }
    }
}

impl LambdaGrid {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.count >= 1
            && self.min_factor > 0.0
            && self.min_factor.is_finite()
            && self.max_factor.is_finite()
            && self.max_factor >= self.min_factor;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidParameter(format!(
                "invalid λ grid {self:?}: need count ≥ 1 and 0 < min_factor ≤ max_factor"
            )))
        }
    }

    /// Ascending grid `{min_factor·σ₁, …, max_factor·σ₁}`.
    pub fn values(&self, sigma1: f64) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min_factor * sigma1];
        }
        let (lo, hi) = (self.min_factor.ln(), self.max_factor.ln());
        let step = (hi - lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| sigma1 * (lo + step * i as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub alpha: DVector<f64>,
    pub method: Method,
    pub param: Param,
    /// `‖Aα − f‖₂`
    pub rho: f64,
    /// `‖α‖₂`
    pub eta: f64,
    /// `(λ, GCV(λ))` over the grid points that were not excluded.
    pub gcv_trace: Option<Vec<(f64, f64)>>,
    /// `(λ, log ρ, log η)`.
    pub lcurve_trace: Option<Vec<(f64, f64, f64)>>,
    /// Krylov steps actually taken (0 for full-SVD methods).
    pub iterations: usize,
    pub breakdown: Option<Breakdown>,
    /// Relative error of each unregularized GMRES iterate against a supplied
    /// reference solution.
    pub error_trace: Option<Vec<f64>>,
    /// Residual norm of each unregularized GMRES iterate.
    pub residual_trace: Option<Vec<f64>>,
    pub wall_time: Duration,
}

impl SolveReport {
    pub(crate) fn new(alpha: DVector<f64>, method: Method, param: Param, rho: f64, eta: f64) -> Self {
        Self {
            alpha,
            method,
            param,
            rho,
            eta,
            gcv_trace: None,
            lcurve_trace: None,
            iterations: 0,
            breakdown: None,
            error_trace: None,
            residual_trace: None,
            wall_time: Duration::ZERO,
        }
    }

    /// Writes `lambda,gcv`.
    pub fn write_gcv_csv(&self, path: impl AsRef<std::path::Path>) -> crate::Result<()> {
        let mut out = String::from("lambda,gcv\n");
        for (l, g) in self.gcv_trace.iter().flatten() {
            out.push_str(&format!("{l:e},{g:e}\n"));
        }
        let path = path.as_ref();
        std::fs::write(path, out).map_err(|e| crate::Error::io(path, e))
    }

    /// Writes `lambda,log_rho,log_eta`.
    pub fn write_lcurve_csv(&self, path: impl AsRef<std::path::Path>) -> crate::Result<()> {
        let mut out = String::from("lambda,log_rho,log_eta\n");
        for (l, x, y) in self.lcurve_trace.iter().flatten() {
            out.push_str(&format!("{l:e},{x:e},{y:e}\n"));
        }
        let path = path.as_ref();
        std::fs::write(path, out).map_err(|e| crate::Error::io(path, e))
    }
}
