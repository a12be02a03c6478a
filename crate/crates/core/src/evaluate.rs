//! Manufactured Gaussian solutions, reconstruction of the MQ expansion, and
//! the relative max-norm error.

use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::assembly::{BoundarySpec, ProblemSpec};
use crate::kernel::{mq_value, KernelParams};
use crate::points::PointSet;
use crate::{Error, Result, Vec3};

/// `u(x) = exp(−‖x − center‖²/σ)`, solving `Δu + k²u = f` for the matching
/// source.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase {
    pub name: String,
    pub center: Vec3,
    sigma: f64,
    wavenumber: f64,
}

impl ManufacturedCase {
    pub fn new(name: impl Into<String>, center: Vec3, sigma: f64, wavenumber: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("σ must be positive, got {sigma}")));
        }
        if !(wavenumber >= 0.0 && wavenumber.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wavenumber must be ≥ 0, got {wavenumber}"
            )));
        }
        Ok(Self {
            name: name.into(),
            center,
            sigma,
            wavenumber,
        })
    }

    /// Unit cube: centered at the origin, σ = 20.
    pub fn cube(wavenumber: f64) -> Self {
        Self::new("cube", Vec3::zeros(), 20.0, wavenumber).unwrap()
    }

    /// Unit ball: off-centre at (0.25, 0.25, 0), σ = 20.
    pub fn sphere(wavenumber: f64) -> Self {
        Self::new("sphere", Vec3::new(0.25, 0.25, 0.0), 20.0, wavenumber).unwrap()
    }

    /// Imported pump-casing geometry: centered at the origin, σ = 10.
    pub fn pump(wavenumber: f64) -> Self {
        Self::new("pump", Vec3::zeros(), 10.0, wavenumber).unwrap()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Dirichlet problem whose exact solution is this case.
    pub fn problem(&self, kernel: KernelParams) -> Result<ProblemSpec> {
        let src = self.clone();
        let bnd = self.clone();
        ProblemSpec::new(
            self.wavenumber,
            kernel,
            BoundarySpec::dirichlet(),
            Arc::new(move |x| manufactured_source(&src, x)),
            Arc::new(move |x| exact_u(&bnd, x)),
        )
    }
}

pub fn exact_u(case: &ManufacturedCase, x: &Vec3) -> f64 {
    (-(x - case.center).norm_squared() / case.sigma).exp()
}

/// `Δu + k²u = u·(4r²/σ² − 6/σ + k²)` with `r = ‖x − center‖`.
pub fn manufactured_source(case: &ManufacturedCase, x: &Vec3) -> f64 {
    let r2 = (x - case.center).norm_squared();
    let s = case.sigma;
    let k = case.wavenumber;
    exact_u(case, x) * (4.0 * r2 / (s * s) - 6.0 / s + k * k)
}

/// `u(X) = Σ_j α_j φ(‖X − X_j‖)` at each target.
pub fn reconstruct(
    alpha: &DVector<f64>,
    centers: &PointSet,
    p: KernelParams,
    targets: &[Vec3],
) -> Result<Vec<f64>> {
    if alpha.len() != centers.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} centers",
            alpha.len(),
            centers.len()
        )));
    }
    let c = centers.centers_vec();
    Ok(targets
        .par_iter()
        .map(|x| {
            c.iter()
                .zip(alpha.iter())
                .map(|(cj, a)| a * mq_value((x - cj).norm(), p))
                .sum()
        })
        .collect())
}

/// `‖u − u_a‖_∞ / ‖u‖_∞`.
pub fn relative_error(exact: &[f64], approx: &[f64]) -> Result<f64> {
    if exact.len() != approx.len() {
        return Err(Error::Dimension(format!(
            "{} exact values vs {} approximate values",
            exact.len(),
            approx.len()
        )));
    }
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter("exact field is identically zero".into()));
    }
    let diff = exact
        .iter()
        .zip(approx)
        .fold(0.0f64, |m, (u, a)| m.max((u - a).abs()));
    Ok(diff / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::interpolation_matrix;
    use crate::points::BoundaryNode;
    use approx::assert_relative_eq;

    #[test]
    fn exact_solution_examples() {
        assert_eq!(exact_u(&ManufacturedCase::cube(3.0), &Vec3::zeros()), 1.0);
        assert_relative_eq!(
            exact_u(&ManufacturedCase::cube(3.0), &Vec3::repeat(1.0)),
            0.860708,
            epsilon = 1e-6
        );
        assert_eq!(
            exact_u(&ManufacturedCase::sphere(3.0), &Vec3::new(0.25, 0.25, 0.0)),
            1.0
        );
    }

    #[test]
    fn source_examples() {
        let c = ManufacturedCase::cube(3.0);
        assert_relative_eq!(manufactured_source(&c, &Vec3::zeros()), 8.7, epsilon = 1e-14);
        let c0 = ManufacturedCase::cube(0.0);
        assert_relative_eq!(manufactured_source(&c0, &Vec3::zeros()), -0.3, epsilon = 1e-15);
        // Root of the radial factor: 4r²/σ² = 6/σ with k = 0.
        let r = (6.0 / 20.0 * 400.0 / 4.0f64).sqrt();
        assert_relative_eq!(manufactured_source(&c0, &Vec3::new(r, 0.0, 0.0)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_cases() {
        assert!(ManufacturedCase::new("x", Vec3::zeros(), 0.0, 1.0).is_err());
        assert!(ManufacturedCase::new("x", Vec3::zeros(), 1.0, -1.0).is_err());
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_relative_eq!(relative_error(&[1.0, 2.0], &[1.0, 2.2]).unwrap(), 0.1, epsilon = 1e-15);
        assert_relative_eq!(
            relative_error(&[0.5, -1.0], &[0.5, -1.001]).unwrap(),
            0.001,
            epsilon = 1e-12
        );
        assert!(relative_error(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(relative_error(&[1.0], &[1.0, 0.0]).is_err());
    }

    fn tiny_set() -> PointSet {
        let interior: Vec<Vec3> = (0..6)
            .map(|i| Vec3::new(0.1 * i as f64, 0.05 * (i * i) as f64 % 0.7, 0.3))
            .collect();
        let boundary = (0..4)
            .map(|i| BoundaryNode {
                position: Vec3::new(1.0, 0.2 * i as f64, 0.0),
                normal: Vec3::x(),
            })
            .collect();
        PointSet::new(interior, boundary, "tiny").unwrap()
    }

    #[test]
    fn reconstruct_unit_and_zero_coefficients() {
        let pts = tiny_set();
        let p = KernelParams::new(1.5).unwrap();
        let targets = vec![Vec3::new(0.3, 0.1, 0.2), Vec3::new(-1.0, 2.0, 0.5)];
        let mut e = DVector::zeros(pts.len());
        e[3] = 1.0;
        let v = reconstruct(&e, &pts, p, &targets).unwrap();
        let c3 = pts.centers_vec()[3];
        for (t, val) in targets.iter().zip(v) {
            assert_relative_eq!(val, mq_value((t - c3).norm(), p), epsilon = 1e-15);
        }
        let z = reconstruct(&DVector::zeros(pts.len()), &pts, p, &targets).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
        assert!(reconstruct(&DVector::zeros(3), &pts, p, &targets).is_err());
    }

    #[test]
    fn interpolation_round_trip() {
        let pts = tiny_set();
        let p = KernelParams::new(5.0).unwrap();
        let case = ManufacturedCase::cube(3.0);
        let nodes = pts.centers_vec();
        let u: Vec<f64> = nodes.iter().map(|x| exact_u(&case, x)).collect();
        let b = interpolation_matrix(&pts, p);
        let alpha = b.lu().solve(&DVector::from_vec(u.clone())).unwrap();
        let back = reconstruct(&alpha, &pts, p, &nodes).unwrap();
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
