//! Seeded random generators for tests and self-checks: Gaussian complex
//! matrices, Haar-distributed unitaries, and random density matrices.
//!
//! Everything here is deterministic given the seed (ChaCha stream cipher
//! RNG), so checks built on random inputs reproduce bit-for-bit across
//! platforms.

use crate::linalg::ComplexMatrix;
use crate::{CMatrix, Real, C64};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut ChaCha12Rng) -> Real {
    // Box-Muller on open-interval uniforms; u1 > 0 keeps ln finite.
    let u1: Real = loop {
        let u: Real = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let u2: Real = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn gaussian_matrix(n: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(standard_normal(rng), standard_normal(rng)))
}

/// Haar-distributed unitary: modified Gram-Schmidt on a complex Ginibre
/// matrix. MGS produces the QR factor with real positive R diagonal, which
/// is exactly the section of the QR map whose Q is Haar.
pub fn haar_unitary(n: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    let g = gaussian_matrix(n, rng);
    // Columns of g, orthonormalized left to right.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let mut overlap = C64::new(0.0, 0.0);
            for i in 0..n {
                overlap += cols[k][i].conj() * cols[j][i];
            }
            for i in 0..n {
                let corr = overlap * cols[k][i];
                cols[j][i] -= corr;
            }
        }
        // Ginibre columns are almost surely independent; a zero residual
        // cannot occur with continuous entries.
        let norm: Real = cols[j].iter().map(|z| z.norm_sqr()).sum::<Real>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= C64::new(norm, 0.0);
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random full-rank density matrix: normalized `G G^dag` with Ginibre `G`.
pub fn random_density(n: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    let g = gaussian_matrix(n, rng);
    let mut m = g.matmul(&g.adjoint());
    m.hermitize();
    let tr = m.trace().re;
    m.scale(1.0 / tr)
}

/// Kraus operators of a random CPTP channel on dimension `dim`: a Haar
/// unitary on system x environment compressed against the environment ground
/// state, `K_k = (I (x) <k|) U (I (x) |0>)`. Stinespring guarantees trace
/// preservation exactly (up to the unitary's own roundoff).
pub fn random_channel_kraus(dim: usize, kraus_count: usize, rng: &mut ChaCha12Rng) -> Vec<CMatrix> {
    let total = dim * kraus_count;
    let u = haar_unitary(total, rng);
    // Row (i, k) of U, column (j, 0): environment index is the fast factor.
    (0..kraus_count)
        .map(|k| ComplexMatrix::from_fn(dim, dim, |i, j| u.get(i * kraus_count + k, j * kraus_count)))
        .collect()
}

/// Random normalized pure-state vector.
pub fn random_state_vector(n: usize, rng: &mut ChaCha12Rng) -> Vec<C64> {
    let mut v: Vec<C64> =
        (0..n).map(|_| C64::new(standard_normal(rng), standard_normal(rng))).collect();
    let norm: Real = v.iter().map(|z| z.norm_sqr()).sum::<Real>().sqrt();
    for z in v.iter_mut() {
        *z /= C64::new(norm, 0.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded_rng(7);
        for n in [2usize, 3, 5] {
            let u = haar_unitary(n, &mut rng);
            assert!(u.unitarity_defect() < 1e-12, "defect at n={}", n);
        }
    }

    #[test]
    fn random_density_is_a_state() {
        let mut rng = seeded_rng(11);
        let rho = random_density(4, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(rho.hermitian_asymmetry() < 1e-14);
        let e = crate::linalg::hermitian_eig(&rho, crate::tol::HERMITIAN).unwrap();
        assert!(e.eigenvalues[0] > -1e-14);
    }

    #[test]
    fn seeded_streams_reproduce() {
        let a = gaussian_matrix(3, &mut seeded_rng(42));
        let b = gaussian_matrix(3, &mut seeded_rng(42));
        assert!(a.max_diff(&b) == 0.0);
    }

    #[test]
    fn state_vector_normalized() {
        let v = random_state_vector(6, &mut seeded_rng(3));
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-13);
    }
}
