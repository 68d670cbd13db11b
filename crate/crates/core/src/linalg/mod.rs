//! Dense complex linear algebra over a generic real scalar.
//!
//! Matrices are row-major `Vec<Complex<T>>`. Dimensions in this crate stay
//! small (blocks of a few hundred at most), so everything is straightforward
//! dense arithmetic tuned for cache behavior rather than for BLAS-scale
//! inputs.

mod eig;
mod func;
mod ops;

pub use eig::{hermitian_eig, HermitianEig};
pub use func::matrix_function;
pub use ops::{kron, kron_all, partial_trace, permute_subsystems};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Build from a row-major element vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "expected {} elements for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build elementwise from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from real row-major entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[T]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dim("real entry count does not match shape".to_string()));
        }
        Ok(Self {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        })
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(diag[i], T::zero());
        }
        m
    }

    /// Rank-one matrix `|a><b|`.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Row `r` as a contiguous slice.
    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        let s = Complex::new(s, T::zero());
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Accumulate `self += other * s`.
    pub fn add_scaled_in_place(&mut self, other: &Self, s: T) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let s = Complex::new(s, T::zero());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Matrix product, ikj loop so the inner traversal is contiguous.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch in matmul");
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = vec![Complex::new(T::zero(), T::zero()); m * n];
        for i in 0..m {
            let arow = &self.data[i * k..(i + 1) * k];
            let orow = &mut out[i * n..(i + 1) * n];
            for (p, &a) in arow.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[p * n..(p + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { rows: m, cols: n, data: out }
    }

    /// `U * self * U^dag`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Apply to a column vector.
    pub fn apply_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, b) in self.row(i).iter().zip(v) {
                acc += a * b;
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).fold(
            Complex::new(T::zero(), T::zero()),
            |a, b| a + b,
        )
    }

    /// Largest elementwise magnitude (max-abs norm).
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// Largest elementwise deviation from another matrix.
    pub fn max_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Max elementwise deviation from the conjugate transpose.
    pub fn hermitian_asymmetry(&self) -> T {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut worst = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Error unless `|M - M^dag|` stays within `tol` elementwise.
    pub fn require_hermitian(&self, tol: T) -> Result<()> {
        let a = self.hermitian_asymmetry();
        if a > tol {
            Err(Error::NonHermitianInput {
                max_asymmetry: a.to_f64().unwrap_or(f64::NAN),
            })
        } else {
            Ok(())
        }
    }

    /// Replace by the Hermitian part `(M + M^dag)/2`; cleans rounding drift
    /// after long products of exactly-Hermitian-preserving operations.
    pub fn hermitize(&mut self) {
        assert!(self.is_square());
        let half = T::from_f64(0.5).unwrap();
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                let avg = (self.get(r, c) + self.get(c, r).conj()).scale(half);
                self.set(r, c, avg);
                self.set(c, r, avg.conj());
            }
            let d = self.get(r, r);
            self.set(r, r, Complex::new(d.re, T::zero()));
        }
    }

    /// Max deviation of `U U^dag` from the identity.
    pub fn unitarity_defect(&self) -> T {
        assert!(self.is_square());
        self.matmul(&self.adjoint()).max_diff(&Self::identity(self.rows))
    }

    /// `tr(self * other)`.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        assert_eq!(self.rows, other.cols, "trace product shape mismatch");
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            for p in 0..self.cols {
                acc += self.get(i, p) * other.get(p, i);
            }
        }
        acc
    }
}

impl<T: Scalar> std::fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(8) {
                let z = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_matches_hand_computation() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let ab = a.matmul(&b);
        assert_eq!(ab.get(0, 0), c(0.0, 1.0));
        assert_eq!(ab.get(0, 1), c(1.0, 0.0));
        assert_eq!(ab.get(1, 0), c(0.0, 0.0));
        assert_eq!(ab.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_vec(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let ad = a.adjoint();
        assert_eq!(ad.rows(), 2);
        assert_eq!(ad.get(0, 0), c(1.0, -2.0));
        assert_eq!(ad.get(1, 0), c(3.0, 4.0));
    }

    #[test]
    fn hermiticity_check_flags_asymmetry() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)])
            .unwrap();
        assert!(m.require_hermitian(1e-12).is_err());
        let h = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)])
            .unwrap();
        assert!(h.require_hermitian(1e-12).is_ok());
    }

    #[test]
    fn f32_kernel_compiles_and_multiplies() {
        type M32 = ComplexMatrix<f32>;
        let x = M32::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let sq = x.matmul(&x);
        assert!(sq.max_diff(&M32::identity(2)) < 1e-6);
    }
}
