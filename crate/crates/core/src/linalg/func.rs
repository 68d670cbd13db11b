//! Matrix functions of Hermitian operators via the spectral theorem.

use super::eig::hermitian_eig;
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Evaluate `f` on the spectrum of a Hermitian matrix: `V f(Lambda) V^dag`.
///
/// Eigenvalues with `|lambda| < cutoff` are replaced by exact zero before
/// `f` is applied, so callers handle spectra that are zero up to rounding
/// (density matrices, projectors) by building the zero convention into `f`
/// itself, e.g. `|0 ln 0| = 0`. A non-finite `f(lambda)` is an error: it
/// means the caller asked for a function outside its domain (such as the
/// logarithm of a genuinely rank-deficient state) and the result would be
/// silent NaN poisoning downstream.
pub fn matrix_function<T: Scalar>(
    m: &ComplexMatrix<T>,
    rel_tol: T,
    cutoff: T,
    f: impl Fn(T) -> T,
) -> Result<ComplexMatrix<T>> {
    let e = hermitian_eig(m, rel_tol)?;
    let mut values = Vec::with_capacity(e.eigenvalues.len());
    for &lambda in &e.eigenvalues {
        let x = if lambda.abs() < cutoff { T::zero() } else { lambda };
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::DomainError {
                context: format!(
                    "matrix function produced a non-finite value at eigenvalue {:e}",
                    x.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        values.push(y);
    }
    let n = e.eigenvalues.len();
    let v = &e.vectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = num_complex::Complex::new(T::zero(), T::zero());
            for k in 0..n {
                acc += v.get(i, k) * v.get(j, k).conj() * values[k];
            }
            out.set(i, j, acc);
        }
    }
    out.hermitize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    type M = ComplexMatrix<f64>;

    #[test]
    fn square_of_pauli_x_is_identity() {
        let x = M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let sq = matrix_function(&x, tol::HERMITIAN, 0.0, |v| v * v).unwrap();
        assert!(sq.max_diff(&M::identity(2)) < 1e-13);
    }

    #[test]
    fn entropy_kernel_handles_zero_eigenvalues() {
        // Pure-state projector: spectrum {0, 1}; x ln x must follow the
        // 0 ln 0 = 0 convention through the cutoff clamp.
        let p = M::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let xlnx =
            matrix_function(&p, tol::HERMITIAN, 1e-12, |v| if v <= 0.0 { 0.0 } else { v * v.ln() })
                .unwrap();
        assert!(xlnx.max_abs() < 1e-13);
    }

    #[test]
    fn log_of_rank_deficient_state_errors() {
        let p = M::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = matrix_function(&p, tol::HERMITIAN, 1e-12, |v| v.ln());
        assert!(matches!(r, Err(Error::DomainError { .. })));
    }

    #[test]
    fn exponential_of_diagonal() {
        let h = M::from_diagonal(&[0.0, 1.0]);
        let e = matrix_function(&h, tol::HERMITIAN, 0.0, |v| (-v).exp()).unwrap();
        assert!((e.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((e.get(1, 1).re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(e.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_sqrt() {
        // I has a doubly degenerate eigenvalue; any orthonormal eigenbasis
        // must still give sqrt(I) = I.
        let m = M::identity(3).scale(4.0);
        let s = matrix_function(&m, tol::HERMITIAN, 0.0, |v| v.sqrt()).unwrap();
        assert!(s.max_diff(&M::identity(3).scale(2.0)) < 1e-13);
    }
}
