//! Dense complex matrices and Hermitian positive-definite solves.
//!
//! The sizes here are tiny (covariance matrices up to the receive antenna
//! count), so a plain row-major layout and an unblocked Cholesky
//! factorization are all that is needed. Solves never form an explicit
//! inverse.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    /// n-by-n identity.
    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// A += w * v v^H (rank-one Hermitian update with real weight).
    pub fn add_scaled_outer(&mut self, w: f64, v: &[Complex64]) {
        assert_eq!(self.rows, self.cols);
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let upd = v[i] * v[j].conj() * w;
                self.data[i * self.cols + j] += upd;
            }
        }
    }

    pub(crate) fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Solve A x = b for Hermitian positive-definite A via Cholesky.
///
/// A must be square and Hermitian to within 1e-10 entrywise (relative to
/// its largest entry); a non-positive pivot reports a numerical error,
/// signalling a degenerate covariance.
pub fn hermitian_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Domain(format!(
            "hermitian_solve requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.len() != n {
        return Err(Error::Domain(format!(
            "right-hand side length {} does not match matrix size {n}",
            b.len()
        )));
    }
    let scale = a
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for i in 0..n {
        for j in 0..=i {
            let asym = (a.get(i, j) - a.get(j, i).conj()).norm();
            if asym > 1e-10 * scale {
                return Err(Error::Domain(format!(
                    "matrix is not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {asym:e}"
                )));
            }
        }
    }

    let mut l = a.as_slice().to_vec();
    cholesky_lower_in_place(&mut l, n)?;
    let mut x = b.to_vec();
    forward_substitute(&l, n, &mut x);
    back_substitute_conj(&l, n, &mut x);
    Ok(x)
}

/// In-place Cholesky A = L L^H reading/writing the lower triangle of the
/// row-major n-by-n buffer. Errors if a pivot is not strictly positive.
pub(crate) fn cholesky_lower_in_place(a: &mut [Complex64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut diag = a[j * n + j].re;
        for k in 0..j {
            diag -= a[j * n + k].norm_sqr();
        }
        if !(diag > 0.0) {
            return Err(Error::Numerical(format!(
                "Cholesky pivot {diag:e} at index {j}: matrix is not positive definite"
            )));
        }
        let ljj = diag.sqrt();
        a[j * n + j] = Complex64::new(ljj, 0.0);
        let inv = 1.0 / ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s * inv;
        }
    }
    Ok(())
}

/// Solve L y = b in place (L lower triangular in the row-major buffer).
#[inline]
pub(crate) fn forward_substitute(l: &[Complex64], n: usize, b: &mut [Complex64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i].re;
    }
}

/// Solve L^H x = y in place.
fn back_substitute_conj(l: &[Complex64], n: usize, y: &mut [Complex64]) {
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i].conj() * y[k];
        }
        y[i] = s / l[i * n + i].re;
    }
}
