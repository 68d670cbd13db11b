//! Tensor-structure operations: Kronecker products, partial traces, and
//! subsystem permutations on row-major matrices.
//!
//! Composite indices are row-major over the factor list: the first factor
//! varies slowest. All three operations validate the factor dimensions
//! against the matrix shape and return typed errors on misuse, since the
//! callers assemble factor lists dynamically from labeled spaces.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;

/// Kronecker product, first operand slow: `(A kron B)[ia*rb+ib, ja*cb+jb]`.
pub fn kron<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ib in 0..rb {
            let row = ia * rb + ib;
            for ja in 0..ca {
                let av = a.get(ia, ja);
                if av.re == T::zero() && av.im == T::zero() {
                    continue;
                }
                for jb in 0..cb {
                    out.set(row, ja * cb + jb, av * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<T: Scalar>(factors: &[&ComplexMatrix<T>]) -> ComplexMatrix<T> {
    assert!(!factors.is_empty(), "kron_all needs at least one factor");
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = kron(&acc, f);
    }
    acc
}

fn check_dims<T: Scalar>(m: &ComplexMatrix<T>, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::dim("zero-dimensional tensor factor".to_string()));
    }
    if !m.is_square() || m.rows() != total {
        return Err(Error::dim(format!(
            "factor dimensions {:?} give total {}, matrix is {}x{}",
            dims,
            total,
            m.rows(),
            m.cols()
        )));
    }
    Ok(total)
}

/// Row-major strides for a factor list.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over the selected factors, the last
/// selected factor varying fastest.
fn offsets_over(selected: &[usize], dims: &[usize], stride: &[usize]) -> Vec<usize> {
    let count: usize = selected.iter().map(|&i| dims[i]).product();
    let mut out = Vec::with_capacity(count);
    for mut v in 0..count {
        let mut off = 0usize;
        for &i in selected.iter().rev() {
            off += (v % dims[i]) * stride[i];
            v /= dims[i];
        }
        out.push(off);
    }
    out
}

/// Partial trace keeping the factors listed in `keep` (strictly ascending).
///
/// The kept factors retain their relative order; the result acts on the
/// tensor product of the kept factors alone.
pub fn partial_trace<T: Scalar>(
    m: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    check_dims(m, dims)?;
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidPermutation {
            context: format!("keep list {:?} must be strictly ascending factor indices", keep),
        });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let stride = strides(dims);
    let keep_off = offsets_over(keep, dims, &stride);
    let tr_off = offsets_over(&traced, dims, &stride);

    let n = m.rows();
    let dk = keep_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &t in &tr_off {
                acc += m.data()[(keep_off[i] + t) * n + keep_off[j] + t];
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Reorder tensor factors. `perm[s]` is the old factor index that lands in
/// new slot `s`; the output acts on factors ordered
/// `[old[perm[0]], old[perm[1]], ...]`.
pub fn permute_subsystems<T: Scalar>(
    m: &ComplexMatrix<T>,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total = check_dims(m, dims)?;
    let k = dims.len();
    if perm.len() != k {
        return Err(Error::InvalidPermutation {
            context: format!("permutation length {} for {} factors", perm.len(), k),
        });
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidPermutation {
                context: format!("{:?} is not a permutation of 0..{}", perm, k),
            });
        }
        seen[p] = true;
    }

    let old_stride = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    // Map each new flat index to the old flat index carrying the same
    // factor values.
    let mut map = vec![0usize; total];
    for (new_flat, slot) in map.iter_mut().enumerate() {
        let mut v = new_flat;
        let mut old_flat = 0usize;
        for s in (0..k).rev() {
            old_flat += (v % new_dims[s]) * old_stride[perm[s]];
            v /= new_dims[s];
        }
        *slot = old_flat;
    }

    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out.set(i, j, m.get(map[i], map[j]));
        }
    }
    Ok(out)
}
