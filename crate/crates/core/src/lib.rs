//! Meshless multiquadric (MQ) RBF collocation for the 3D Helmholtz equation
//! `Δu + k²u = f`, with regularized solvers for the dense, severely
//! ill-conditioned collocation systems it produces.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`]: the MQ basis function and the derivatives collocation needs.
//! * [`points`]: collocation node sets (generated or imported).
//! * [`assembly`]: the Kansa collocation matrix and right-hand side.
//! * [`bidiag`]: Golub–Kahan bidiagonalization.
//! * [`regularize`]: SVD, TSVD, projected TSVD, Tikhonov with GCV and
//!   L-curve, hybrid Krylov–Tikhonov and the Arnoldi–Tikhonov baseline.
//! * [`evaluate`]: manufactured solutions, reconstruction and error metrics.
//! * [`experiment`]: the configuration-driven runner behind the CLI.

pub mod assembly;
pub mod bidiag;
pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod kernel;
pub mod linop;
pub mod points;
pub mod regularize;

pub use error::{Error, Result};

/// A point or direction in R³.
pub type Vec3 = nalgebra::Vector3<f64>;
