use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::hybrid::ProjectedProblem;
use super::{Method, Param, SolveReport, SvdFactors};
use crate::linop::LinearOperator;
use crate::{Error, Result};

/// Truncation rank for the projected TSVD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    Fixed(usize),
    /// Minimize the truncation-GCV functional (see [`rank_rule_gcv`]).
    Auto,
}

/// `α = Σ_{i≤k} (u_iᵀf/σ_i) v_i`.
pub fn tsvd_solve(s: &SvdFactors, f: &DVector<f64>, k: usize) -> Result<SolveReport> {
    if k == 0 || k > s.rank() {
        return Err(Error::InvalidParameter(format!(
            "truncation rank must be in 1..={}, got {k}",
            s.rank()
        )));
    }
    let data = s.project(f)?;
    let coords = data.tsvd_coords(k);
    let eta = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(SolveReport::new(
        s.lift(&coords),
        Method::Tsvd,
        Param::Rank(k),
        data.tsvd_residual_sq(k).sqrt(),
        eta,
    ))
}

/// Truncation-GCV rank choice on `ℓ` Ritz values:
/// `k* = argmin_k Σ_{i>k} f̂_i² / (ℓ+1−k)²` over `1 ≤ k ≤ min(#σ, ℓ)`.
///
/// `fhat` holds the data coordinates in the full left basis of the surrogate
/// (it may carry more entries than `sigma_ritz`; the tail enters every
/// residual). Ties go to the smaller `k`.
pub fn rank_rule_gcv(sigma_ritz: &[f64], fhat: &[f64], ell: usize) -> usize {
    let kmax = sigma_ritz
        .iter()
        .take_while(|&&s| s > 0.0)
        .count()
        .min(ell)
        .min(fhat.len());
    if kmax <= 1 {
        return 1;
    }
    let sq: Vec<f64> = fhat.iter().map(|f| f * f).collect();
    // tail[k] = Σ_{i≥k} f̂_i²
    let mut tail = vec![0.0; sq.len() + 1];
    for i in (0..sq.len()).rev() {
        tail[i] = tail[i + 1] + sq[i];
    }
    let mut best = (1, f64::INFINITY);
    for k in 1..=kmax {
        let dof = (ell + 1 - k) as f64;
        let g = tail[k] / (dof * dof);
        if g < best.1 {
            best = (k, g);
        }
    }
    best.0
}

/// Projected ("inexpensive") TSVD: `ℓ` Golub–Kahan steps, SVD of the
/// bidiagonal `C_ℓ`, TSVD of the surrogate, lifted by `Z_ℓ`.
pub fn ine_tsvd<A: LinearOperator + ?Sized>(
    a: &A,
    f: &DVector<f64>,
    ell: usize,
    k: Truncation,
) -> Result<SolveReport> {
    let start = Instant::now();
    if let Truncation::Fixed(k) = k {
        if k == 0 || k > ell {
            return Err(Error::InvalidParameter(format!(
                "truncation rank must be in 1..={ell}, got {k}"
            )));
        }
    }
    let proj = ProjectedProblem::new(a, f, ell)?;
    let data = &proj.data;
    let available = data.rank();
    let k = match k {
        Truncation::Fixed(k) if k > available => {
            log::warn!(
                "projected TSVD: only {available} Ritz values available (requested k = {k}, \
                 {} GKB steps completed)",
                proj.steps()
            );
            available
        }
        Truncation::Fixed(k) => k,
        Truncation::Auto => {
            let mut fhat = data.fhat.clone();
            fhat.push(data.out_of_range.sqrt());
            rank_rule_gcv(&data.sigma, &fhat, proj.steps())
        }
    };
    let coords = data.tsvd_coords(k);
    let eta = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut report = SolveReport::new(
        proj.lift(&coords),
        Method::IneTsvd,
        Param::Rank(k),
        data.tsvd_residual_sq(k).sqrt(),
        eta,
    );
    report.iterations = proj.steps();
    report.breakdown = proj.gkb.breakdown;
    report.wall_time = start.elapsed();
    Ok(report)
}
