use nalgebra::DVector;

use super::{Method, Param, SolveReport, SvdFactors};
use crate::{Error, Result};

/// Singular values and data coordinates `f̂_i = u_iᵀ f` of a (possibly
/// projected) least-squares problem.
///
/// `dim` is the length of the data vector: `N` for the full problem, `ℓ+1`
/// for a Golub–Kahan surrogate. `out_of_range` is `Σ_{i>r} f̂_i²`, the data
/// energy no filter can reach.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub sigma: Vec<f64>,
    pub fhat: Vec<f64>,
    pub out_of_range: f64,
    pub dim: usize,
}

impl SpectralData {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `φ_i(λ) = σ_i²/(σ_i²+λ²)`
    pub fn filter_factors(&self, lambda: f64) -> Vec<f64> {
        let l2 = lambda * lambda;
        self.sigma.iter().map(|s| s * s / (s * s + l2)).collect()
    }

    /// `1 − φ_i(λ)`, computed without cancellation.
    fn complements(&self, lambda: f64) -> impl Iterator<Item = f64> + '_ {
        let l2 = lambda * lambda;
        self.sigma.iter().map(move |s| l2 / (s * s + l2))
    }

    /// `ρ²(λ) = Σ (1−φ_i)² f̂_i² + Σ_{i>r} f̂_i²`
    pub fn residual_sq(&self, lambda: f64) -> f64 {
        self.complements(lambda)
            .zip(&self.fhat)
            .map(|(c, f)| (c * f) * (c * f))
            .sum::<f64>()
            + self.out_of_range
    }

    /// `η²(λ) = Σ (φ_i f̂_i / σ_i)²`
    pub fn solution_norm_sq(&self, lambda: f64) -> f64 {
        self.tikhonov_coords(lambda).iter().map(|c| c * c).sum()
    }

    /// `Σ φ_i(λ)`, the trace of the influence matrix.
    pub fn trace(&self, lambda: f64) -> f64 {
        self.filter_factors(lambda).iter().sum()
    }

    /// `dim − Σ φ_i`, accumulated as `(dim − r) + Σ (1 − φ_i)`.
    fn effective_dof(&self, lambda: f64) -> f64 {
        (self.dim - self.rank()) as f64 + self.complements(lambda).sum::<f64>()
    }

    /// `GCV(λ) = ρ²(λ) / [dim − Σ φ_i(λ)]²`, or `None` when the denominator
    /// has vanished in floating point.
    pub fn gcv(&self, lambda: f64) -> Option<f64> {
        let d = self.effective_dof(lambda);
        if !(d > 0.0) {
            return None;
        }
        let g = self.residual_sq(lambda) / (d * d);
        g.is_finite().then_some(g)
    }

    /// Coordinates `φ_i f̂_i / σ_i` of the Tikhonov solution in the right
    /// singular basis. Written as `σ_i f̂_i / (σ_i² + λ²)` to stay finite for
    /// tiny `σ_i`.
    pub fn tikhonov_coords(&self, lambda: f64) -> Vec<f64> {
        let l2 = lambda * lambda;
        self.sigma
            .iter()
            .zip(&self.fhat)
            .map(|(s, f)| s * f / (s * s + l2))
            .collect()
    }

    /// Coordinates `f̂_i / σ_i` for `i ≤ k`.
    pub fn tsvd_coords(&self, k: usize) -> Vec<f64> {
        self.sigma[..k]
            .iter()
            .zip(&self.fhat)
            .map(|(s, f)| f / s)
            .collect()
    }

    /// Residual of the rank-`k` truncation: `Σ_{i>k} f̂_i² + out_of_range`.
    pub fn tsvd_residual_sq(&self, k: usize) -> f64 {
        self.fhat[k..].iter().map(|f| f * f).sum::<f64>() + self.out_of_range
    }

    /// Minimizes GCV over an ascending positive grid. Returns `λ*` and the
    /// trace of non-excluded points. Ties go to the smaller λ.
    pub fn select_gcv(&self, grid: &[f64]) -> Result<(f64, Vec<(f64, f64)>)> {
        check_grid(grid)?;
        let trace: Vec<(f64, f64)> = grid
            .iter()
            .filter_map(|&l| self.gcv(l).map(|g| (l, g)))
            .collect();
        let best = trace
            .iter()
            .fold(None::<(f64, f64)>, |best, &(l, g)| match best {
                Some((_, bg)) if bg <= g => best,
                _ => Some((l, g)),
            })
            .ok_or_else(|| Error::Solver("GCV undefined at every grid point".into()))?;
        Ok((best.0, trace))
    }

    /// `(λ, ρ, η)` at each grid point.
    pub fn lcurve_samples(&self, grid: &[f64]) -> Vec<(f64, f64, f64)> {
        grid.iter()
            .map(|&l| (l, self.residual_sq(l).sqrt(), self.solution_norm_sq(l).sqrt()))
            .collect()
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("λ grid is empty".into()));
    }
    if grid.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter("λ grid must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("λ grid must be sorted ascending".into()));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("λ must be positive, got {lambda}")))
    }
}

/// Tikhonov solution `Σ φ_i(λ) (u_iᵀ f/σ_i) v_i` from a full SVD.
pub fn tikhonov_filter_solve(s: &SvdFactors, f: &DVector<f64>, lambda: f64) -> Result<SolveReport> {
    check_lambda(lambda)?;
    let data = s.project(f)?;
    let coords = data.tikhonov_coords(lambda);
    let alpha = s.lift(&coords);
    Ok(SolveReport::new(
        alpha,
        Method::TikhRg,
        Param::Lambda(lambda),
        data.residual_sq(lambda).sqrt(),
        data.solution_norm_sq(lambda).sqrt(),
    ))
}

/// `GCV(λ)` for the full problem with `n` data points.
pub fn gcv_value(s: &SvdFactors, f: &DVector<f64>, lambda: f64, n: usize) -> Result<f64> {
    check_lambda(lambda)?;
    let mut data = s.project(f)?;
    data.dim = n;
    if n < data.rank() {
        return Err(Error::InvalidParameter(format!(
            "data dimension {n} below the numerical rank {}",
            data.rank()
        )));
    }
    data.gcv(lambda)
        .ok_or_else(|| Error::Solver(format!("GCV denominator vanishes at λ = {lambda}")))
}

/// Grid minimizer of GCV for the full problem (classical Tikh-Reg).
pub fn select_lambda_gcv(
    s: &SvdFactors,
    f: &DVector<f64>,
    grid: &[f64],
) -> Result<(f64, Vec<(f64, f64)>)> {
    s.project(f)?.select_gcv(grid)
}
