//! The multiquadric kernel `φ(r; ε) = √(1 + ε²r²)` and the derivatives the
//! Kansa collocation needs in three dimensions.
//!
//! All functions are pure scalar evaluations of the radial profile.

use crate::{Error, Result, Vec3};

/// Shape parameter of the multiquadric. Smaller `epsilon` means flatter basis
/// functions, better accuracy and worse conditioning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    epsilon: f64,
}

impl KernelParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self { epsilon })
        } else {
            Err(Error::InvalidParameter(format!(
                "shape parameter must be positive and finite, got {epsilon}"
            )))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// `√(1 + ε²r²)`.
pub fn mq_value(r: f64, p: KernelParams) -> f64 {
    let er = p.epsilon * r;
    (1.0 + er * er).sqrt()
}

/// Radial derivative `φ'(r) = ε²r / √(1 + ε²r²)`.
pub fn mq_radial_derivative(r: f64, p: KernelParams) -> f64 {
    let e2 = p.epsilon * p.epsilon;
    e2 * r / (1.0 + e2 * r * r).sqrt()
}

/// 3D Laplacian of the multiquadric, `φ'' + 2φ'/r`, in the closed form
/// `ε²(3 + 2ε²r²) / (1 + ε²r²)^{3/2}`. The closed form has no `1/r` factor, so
/// `r = 0` evaluates to the limit `3ε²` directly.
pub fn mq_laplacian3d(r: f64, p: KernelParams) -> f64 {
    let e2 = p.epsilon * p.epsilon;
    let s = 1.0 + e2 * r * r;
    e2 * (3.0 + 2.0 * e2 * r * r) / (s * s.sqrt())
}

/// Image of the multiquadric under the Helmholtz operator `Δ + k²`.
pub fn mq_helmholtz(r: f64, p: KernelParams, k: f64) -> f64 {
    mq_laplacian3d(r, p) + k * k * mq_value(r, p)
}

/// Derivative of `φ(‖x − center‖)` at `x` along `normal`.
///
/// Returns 0 at `x == center`, where the gradient vanishes.
pub fn mq_normal_derivative(x: &Vec3, center: &Vec3, normal: &Vec3, p: KernelParams) -> f64 {
    let d = x - center;
    let r = d.norm();
    if r == 0.0 {
        return 0.0;
    }
    // φ'(r)/r = ε²/√(1+ε²r²) avoids dividing by a tiny r.
    let e2 = p.epsilon * p.epsilon;
    e2 / (1.0 + e2 * r * r).sqrt() * d.dot(normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eps(e: f64) -> KernelParams {
        KernelParams::new(e).unwrap()
    }

    #[test]
    fn rejects_nonpositive_shape() {
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(-1.0).is_err());
        assert!(KernelParams::new(f64::NAN).is_err());
    }

    #[test]
    fn value_examples() {
        assert_eq!(mq_value(0.0, eps(3.7)), 1.0);
        assert_relative_eq!(mq_value(1.0, eps(1.0)), 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(mq_value(2.0, eps(0.5)), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn laplacian_examples() {
        assert_relative_eq!(mq_laplacian3d(0.0, eps(1.0)), 3.0, epsilon = 1e-15);
        assert_relative_eq!(
            mq_laplacian3d(1.0, eps(1.0)),
            5.0 / 2f64.powf(1.5),
            epsilon = 1e-15
        );
        assert_relative_eq!(mq_laplacian3d(100.0, eps(1.0)), 0.0200, epsilon = 1e-4);
    }

    #[test]
    fn helmholtz_examples() {
        assert_relative_eq!(mq_helmholtz(0.0, eps(1.0), 0.0), 3.0, epsilon = 1e-15);
        assert_relative_eq!(mq_helmholtz(0.0, eps(1.0), 3.0), 12.0, epsilon = 1e-14);
        assert_relative_eq!(mq_helmholtz(1.0, eps(1.0), 3.0), 14.4956, epsilon = 1e-4);
    }

    #[test]
    fn normal_derivative_examples() {
        let o = Vec3::zeros();
        let ex = Vec3::x();
        assert_eq!(mq_normal_derivative(&o, &o, &ex, eps(1.0)), 0.0);
        assert_relative_eq!(
            mq_normal_derivative(&ex, &o, &ex, eps(1.0)),
            1.0 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(mq_normal_derivative(&ex, &o, &Vec3::y(), eps(1.0)), 0.0);
    }

    #[test]
    fn normal_derivative_matches_gradient_fd() {
        let p = eps(1.3);
        let c = Vec3::new(0.2, -0.1, 0.4);
        let x = Vec3::new(-0.5, 0.3, 0.9);
        let n = Vec3::new(1.0, 2.0, -2.0) / 3.0;
        let h = 1e-6;
        let f = |y: Vec3| mq_value((y - c).norm(), p);
        let fd = (f(x + n * h) - f(x - n * h)) / (2.0 * h);
        assert_relative_eq!(mq_normal_derivative(&x, &c, &n, p), fd, epsilon = 1e-8);
    }

    #[test]
    fn radial_derivative_matches_fd() {
        let p = eps(0.8);
        for &r in &[0.0, 0.3, 1.0, 4.0] {
            let h = 1e-6;
            let fd = (mq_value(r + h, p) - mq_value((r - h).abs(), p)) / (2.0 * h);
            let expect = if r == 0.0 { 0.0 } else { fd };
            assert_relative_eq!(mq_radial_derivative(r, p), expect, epsilon = 1e-8);
        }
    }
}
