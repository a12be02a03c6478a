use nalgebra::{DMatrix, DVector};

use super::spectral::SpectralData;
use crate::{Error, Result};

/// Thin SVD `A ≈ U diag(σ) Vᵀ` restricted to the numerical rank.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// M×r
    pub u: DMatrix<f64>,
    /// Retained singular values, non-increasing, all above the rank threshold.
    pub sigma: Vec<f64>,
    /// N×r
    pub v: DMatrix<f64>,
    /// Every singular value, including those below the threshold.
    pub all_sigma: Vec<f64>,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.v.nrows()
    }

    /// Coordinates of `f` in the left singular basis. The out-of-range energy
    /// is measured as `‖f − U Uᵀ f‖²` rather than `‖f‖² − ‖Uᵀ f‖²` so that small
    /// residuals do not drown in cancellation.
    pub fn project(&self, f: &DVector<f64>) -> Result<SpectralData> {
        if f.len() != self.nrows() {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                f.len(),
                self.nrows()
            )));
        }
        let fhat = self.u.tr_mul(f);
        let residual = f - &self.u * &fhat;
        Ok(SpectralData {
            sigma: self.sigma.clone(),
            fhat: fhat.as_slice().to_vec(),
            out_of_range: residual.norm_squared(),
            dim: self.nrows(),
        })
    }

    /// Maps coordinates in the right singular basis back to a coefficient
    /// vector: `V c`.
    pub fn lift(&self, coords: &[f64]) -> DVector<f64> {
        let r = coords.len();
        self.v.columns(0, r) * DVector::from_column_slice(coords)
    }
}

/// Dense SVD with numerical-rank threshold `σ₁·max(M,N)·ε_mach`.
pub fn svd(a: &DMatrix<f64>) -> Result<SvdFactors> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let dec = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Solver("SVD did not converge".into()))?;
    let u_full = dec.u.expect("requested U");
    let vt_full = dec.v_t.expect("requested Vᵀ");
    let s = dec.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let all_sigma: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let threshold = all_sigma[0] * m.max(n) as f64 * f64::EPSILON;
    let rank = all_sigma.iter().take_while(|&&x| x > threshold && x > 0.0).count();

    let u = DMatrix::from_fn(m, rank, |i, k| u_full[(i, order[k])]);
    let v = DMatrix::from_fn(n, rank, |i, k| vt_full[(order[k], i)]);
    Ok(SvdFactors {
        u,
        sigma: all_sigma[..rank].to_vec(),
        v,
        all_sigma,
    })
}
