//! Matrix-free access to a linear operator, plus the plain-text matrix dump.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// An operator that only exposes products with itself and its transpose.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `y ← A x`
    fn apply(&self, x: &DVector<f64>, y: &mut DVector<f64>);

    /// `y ← Aᵀ x`
    fn apply_transpose(&self, x: &DVector<f64>, y: &mut DVector<f64>);

    /// A scale for the operator, used to turn relative tolerances into
    /// absolute ones. Dense matrices return their Frobenius norm.
    fn norm_estimate(&self) -> f64;
}

impl LinearOperator for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn apply(&self, x: &DVector<f64>, y: &mut DVector<f64>) {
        y.gemv(1.0, self, x, 0.0);
    }

    fn apply_transpose(&self, x: &DVector<f64>, y: &mut DVector<f64>) {
        y.gemv_tr(1.0, self, x, 0.0);
    }

    fn norm_estimate(&self) -> f64 {
        self.norm()
    }
}

/// Writes `matrix v1: N M` followed by one row of entries per line.
pub fn write_matrix(m: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("matrix v1: {} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_vector(v: &DVector<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_matrix(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()), path)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let dims = header
        .strip_prefix("matrix v1:")
        .ok_or_else(|| err(1, "expected `matrix v1: N M` header"))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|d| d.parse().map_err(|_| err(1, "bad dimensions")))
        .collect::<Result<_>>()?;
    let [n, m] = dims[..] else {
        return Err(err(1, "expected two dimensions"));
    };
    let mut out = DMatrix::zeros(n, m);
    for i in 0..n {
        let line = lines.next().ok_or_else(|| err(i + 2, "missing row"))?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|v| v.parse().map_err(|_| err(i + 2, "bad entry")))
            .collect::<Result<_>>()?;
        if row.len() != m {
            return Err(err(i + 2, "wrong number of entries"));
        }
        for (j, v) in row.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_products() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut y = DVector::zeros(2);
        a.apply(&DVector::from_vec(vec![1.0, 0.0, -1.0]), &mut y);
        assert_eq!(y.as_slice(), &[-2.0, -2.0]);
        let mut z = DVector::zeros(3);
        a.apply_transpose(&DVector::from_vec(vec![1.0, 1.0]), &mut z);
        assert_eq!(z.as_slice(), &[5.0, 7.0, 9.0]);
    }

    #[test]
    fn matrix_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("A.txt");
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.5e-17, 3.0, 0.1]);
        write_matrix(&a, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("matrix v1: 2 2\n"));
        assert_eq!(read_matrix(&path).unwrap(), a);
    }
}
