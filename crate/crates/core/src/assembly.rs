//! Kansa collocation: Helmholtz rows at interior nodes, boundary-operator rows
//! at boundary nodes, with every node doubling as an MQ center.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::kernel::{mq_helmholtz, mq_normal_derivative, mq_value, KernelParams};
use crate::points::PointSet;
use crate::regularize::svd;
use crate::{Error, Result, Vec3};

/// A real-valued field over R³.
pub type ScalarField = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;

pub fn constant_field(c: f64) -> ScalarField {
    Arc::new(move |_| c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    Dirichlet,
    Robin,
}

/// Coefficients of `a u + b ∂u/∂n = g`. In Dirichlet mode `b` is ignored.
#[derive(Clone)]
pub struct BoundarySpec {
    pub a: ScalarField,
    pub b: ScalarField,
    pub mode: BoundaryMode,
}

impl BoundarySpec {
    /// `u = g`.
    pub fn dirichlet() -> Self {
        Self::dirichlet_scaled(constant_field(1.0))
    }

    /// `a u = g` with a nonvanishing `a`.
    pub fn dirichlet_scaled(a: ScalarField) -> Self {
        Self {
            a,
            b: constant_field(0.0),
            mode: BoundaryMode::Dirichlet,
        }
    }

    pub fn robin(a: ScalarField, b: ScalarField) -> Self {
        Self {
            a,
            b,
            mode: BoundaryMode::Robin,
        }
    }
}

impl fmt::Debug for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySpec").field("mode", &self.mode).finish_non_exhaustive()
    }
}

/// `Δu + k²u = f` in the domain, `a u + b ∂u/∂n = g` on its boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    wavenumber: f64,
    pub kernel: KernelParams,
    pub bc: BoundarySpec,
    pub source: ScalarField,
    pub boundary_data: ScalarField,
}

impl ProblemSpec {
    pub fn new(
        wavenumber: f64,
        kernel: KernelParams,
        bc: BoundarySpec,
        source: ScalarField,
        boundary_data: ScalarField,
    ) -> Result<Self> {
        if !(wavenumber.is_finite() && wavenumber >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavenumber must be finite and ≥ 0, got {wavenumber}"
            )));
        }
        Ok(Self {
            wavenumber,
            kernel,
            bc,
            source,
            boundary_data,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("wavenumber", &self.wavenumber)
            .field("kernel", &self.kernel)
            .field("bc", &self.bc)
            .finish_non_exhaustive()
    }
}

/// The dense system `A α = f`. Rows `0..n_interior` are interior equations.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub n_interior: usize,
    pub centers: PointSet,
    pub spec: ProblemSpec,
}

impl CollocationSystem {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// `‖H α − f_I‖_∞` over the interior rows.
    pub fn interior_residual(&self, alpha: &DVector<f64>) -> f64 {
        let n_i = self.n_interior;
        let h = self.matrix.rows(0, n_i);
        (h * alpha - self.rhs.rows(0, n_i)).amax()
    }
}

pub fn assemble(points: &PointSet, spec: &ProblemSpec) -> Result<CollocationSystem> {
    let centers = points.centers_vec();
    let n = centers.len();
    let n_i = points.n_interior();
    let p = spec.kernel;
    let k = spec.wavenumber;

    let robin = spec.bc.mode == BoundaryMode::Robin;
    let a_vals: Vec<f64> = points.boundary().iter().map(|b| (spec.bc.a)(&b.position)).collect();
    let b_vals: Vec<f64> = if robin {
        points.boundary().iter().map(|b| (spec.bc.b)(&b.position)).collect()
    } else {
        vec![0.0; points.n_boundary()]
    };
    if !robin {
        if let Some(i) = a_vals.iter().position(|&a| a == 0.0 || !a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet coefficient a vanishes at boundary node {i}"
            )));
        }
    }

    let mut matrix = DMatrix::<f64>::zeros(n, n);
    matrix
        .as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(j, col)| {
            let c = centers[j];
            for (i, x) in points.interior().iter().enumerate() {
                col[i] = mq_helmholtz((x - c).norm(), p, k);
            }
            for (ib, node) in points.boundary().iter().enumerate() {
                let x = node.position;
                let mut v = a_vals[ib] * mq_value((x - c).norm(), p);
                if b_vals[ib] != 0.0 {
                    v += b_vals[ib] * mq_normal_derivative(&x, &c, &node.normal, p);
                }
                col[n_i + ib] = v;
            }
        });

    let rhs = DVector::from_iterator(
        n,
        points
            .interior()
            .iter()
            .map(|x| (spec.source)(x))
            .chain(points.boundary().iter().map(|b| (spec.boundary_data)(&b.position))),
    );

    Ok(CollocationSystem {
        matrix,
        rhs,
        n_interior: n_i,
        centers: points.clone(),
        spec: spec.clone(),
    })
}

/// `B_ij = φ(‖X_i − X_j‖)` over all centers.
pub fn interpolation_matrix(points: &PointSet, p: KernelParams) -> DMatrix<f64> {
    interpolation_matrix_from_centers(&points.centers_vec(), p)
}

pub fn interpolation_matrix_from_centers(c: &[Vec3], p: KernelParams) -> DMatrix<f64> {
    DMatrix::from_fn(c.len(), c.len(), |i, j| mq_value((c[i] - c[j]).norm(), p))
}

/// `[[B, 1], [1ᵀ, 0]]`, the interpolation matrix bordered by a constant
/// polynomial block.
pub fn assemble_augmented_interpolation(points: &PointSet, p: KernelParams) -> DMatrix<f64> {
    augmented_interpolation_from_centers(&points.centers_vec(), p)
}

pub fn augmented_interpolation_from_centers(c: &[Vec3], p: KernelParams) -> DMatrix<f64> {
    let b = interpolation_matrix_from_centers(c, p);
    let n = b.nrows();
    let mut out = DMatrix::zeros(n + 1, n + 1);
    out.view_mut((0, 0), (n, n)).copy_from(&b);
    for i in 0..n {
        out[(i, n)] = 1.0;
        out[(n, i)] = 1.0;
    }
    out
}

/// `σ₁/σ_r`, with `r` the numerical rank at threshold `σ₁·max(N,M)·ε_mach`.
pub fn condition_number(a: &DMatrix<f64>) -> Result<f64> {
    let s = svd(a)?;
    match s.rank() {
        0 => Err(Error::InvalidParameter("condition number of a zero matrix".into())),
        r => Ok(s.sigma[0] / s.sigma[r - 1]),
    }
}
