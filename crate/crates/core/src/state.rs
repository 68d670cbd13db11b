//! Density matrices on labeled composite spaces, plus thermal-state
//! construction.
//!
//! `DensityMatrix::new` is the checked entry point: it verifies shape,
//! Hermiticity, unit trace, and positivity (one eigendecomposition).
//! Internal pipelines that only apply trace-preserving positive maps to
//! already-validated states use `from_parts`, which checks shape only.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, matrix_function, partial_trace, permute_subsystems};
use crate::space::CompositeSpace;
use crate::{tol, CMatrix, Real, C64};

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    space: CompositeSpace,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Fully validated construction.
    pub fn new(space: CompositeSpace, mat: CMatrix) -> Result<Self> {
        let dm = Self::from_parts(space, mat)?;
        dm.validate()?;
        Ok(dm)
    }

    /// Shape-checked construction without the spectral positivity test.
    pub fn from_parts(space: CompositeSpace, mat: CMatrix) -> Result<Self> {
        if !mat.is_square() || mat.rows() != space.total_dim() {
            return Err(Error::dim(format!(
                "matrix is {}x{}, space {} has dimension {}",
                mat.rows(),
                mat.cols(),
                space,
                space.total_dim()
            )));
        }
        Ok(Self { space, mat })
    }

    /// Hermiticity, normalization, and positivity checks.
    pub fn validate(&self) -> Result<()> {
        self.mat.require_hermitian(tol::HERMITIAN * (1.0 + self.mat.max_abs()))?;
        let tr = self.mat.trace();
        let norm_dev = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
        if norm_dev > tol::TRACE {
            return Err(Error::NotNormalized { norm: tr.re });
        }
        let e = hermitian_eig(&self.mat, tol::HERMITIAN)?;
        let floor = -tol::PSD_FLOOR * (1.0 + self.mat.max_abs());
        if e.eigenvalues[0] < floor {
            return Err(Error::NotPSD { min_eigenvalue: e.eigenvalues[0] });
        }
        Ok(())
    }

    /// Pure state from an amplitude vector.
    pub fn pure(space: CompositeSpace, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::dim(format!(
                "{} amplitudes for space {} of dimension {}",
                amplitudes.len(),
                space,
                space.total_dim()
            )));
        }
        let norm: Real = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > tol::TRACE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { space, mat: CMatrix::outer(amplitudes, amplitudes) })
    }

    /// Computational basis state `|index>` on the given space.
    pub fn basis_state(space: CompositeSpace, index: usize) -> Result<Self> {
        let d = space.total_dim();
        if index >= d {
            return Err(Error::OutOfRange {
                context: format!("basis index {} in dimension {}", index, d),
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[index] = C64::new(1.0, 0.0);
        Self::pure(space, &amps)
    }

    pub fn maximally_mixed(space: CompositeSpace) -> Self {
        let d = space.total_dim();
        let mat = CMatrix::identity(d).scale(1.0 / d as Real);
        Self { space, mat }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Partial trace keeping the listed labels (any listed order; factors
    /// stay in this state's order).
    pub fn reduce(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let positions = self.space.positions_sorted(keep)?;
        let mat = partial_trace(&self.mat, &self.space.dims(), &positions)?;
        Ok(Self { space: self.space.subspace(keep)?, mat })
    }

    /// Partial trace removing the listed labels.
    pub fn trace_out(&self, drop: &[&str]) -> Result<DensityMatrix> {
        let remaining = self.space.without(drop)?;
        let keep: Vec<&str> = remaining.labels();
        self.reduce(&keep)
    }

    /// Reorder factors to the given label order.
    pub fn permute(&self, new_order: &[&str]) -> Result<DensityMatrix> {
        let perm = self.space.permutation_to(new_order)?;
        let dims = self.space.dims();
        let mat = permute_subsystems(&self.mat, &dims, &perm)?;
        let new_factors: Vec<(&str, usize)> =
            new_order.iter().zip(&perm).map(|(l, &i)| (*l, dims[i])).collect();
        let space = CompositeSpace::new(&new_factors)?;
        Ok(Self { space, mat })
    }

    /// Joint product state.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(Self {
            space: self.space.tensor(&other.space)?,
            mat: kron(&self.mat, &other.mat),
        })
    }

    /// Conjugate by a unitary acting on the listed labels.
    pub fn apply_unitary(&self, u: &CMatrix, on: &[&str]) -> Result<DensityMatrix> {
        let big = self.space.embed(u, on)?;
        let mut mat = self.mat.conjugate_by(&big);
        mat.hermitize();
        Ok(Self { space: self.space.clone(), mat })
    }

    /// Expectation value of a Hermitian observable on the listed labels.
    pub fn expectation(&self, op: &CMatrix, on: &[&str]) -> Result<Real> {
        let red = self.reduce(on)?;
        // The reduction keeps master order; realign the operator if the
        // caller listed labels differently.
        let master: Vec<&str> = red.space.labels();
        let op_aligned = if master == on {
            op.clone()
        } else {
            let listed = CompositeSpace::new(
                &on.iter()
                    .map(|l| (*l, self.space.dim_of(l).unwrap()))
                    .collect::<Vec<_>>(),
            )?;
            let perm = listed.permutation_to(&master)?;
            permute_subsystems(op, &listed.dims(), &perm)?
        };
        Ok(red.mat.trace_product(&op_aligned).re)
    }

    /// Rename one factor.
    pub fn renamed(&self, from: &str, to: &str) -> Result<DensityMatrix> {
        Ok(Self { space: self.space.renamed(from, to)?, mat: self.mat.clone() })
    }

    /// Eigenvalues sorted ascending.
    pub fn spectrum(&self) -> Result<Vec<Real>> {
        Ok(hermitian_eig(&self.mat, tol::HERMITIAN)?.eigenvalues)
    }

    /// Purification with a fresh reference factor prepended. The reference
    /// dimension equals the state dimension (rank-sufficient and uniform
    /// across inputs); spectral weights are sorted descending onto the
    /// reference basis, with weight zero on null directions. Eigenvector
    /// phases are fixed (largest-magnitude entry real positive) so results
    /// are deterministic.
    pub fn purify(&self, ref_label: &str) -> Result<(CompositeSpace, Vec<C64>)> {
        if self.space.contains(ref_label) {
            return Err(Error::UnknownLabel { label: format!("duplicate factor '{}'", ref_label) });
        }
        let e = hermitian_eig(&self.mat, tol::HERMITIAN)?;
        let n = self.dim();
        let mut order: Vec<(Real, usize)> =
            e.eigenvalues.iter().enumerate().map(|(i, &l)| (l.max(0.0), i)).collect();
        order.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("real eigenvalues"));
        let joint = CompositeSpace::single(ref_label, n).tensor(&self.space)?;
        let mut vec = vec![C64::new(0.0, 0.0); n * n];
        for (r, &(lambda, col)) in order.iter().enumerate() {
            if lambda <= 0.0 {
                continue;
            }
            // Deterministic phase: rotate the column so its largest entry
            // is real positive.
            let mut pivot = C64::new(0.0, 0.0);
            let mut best = -1.0;
            for i in 0..n {
                let v = e.vectors.get(i, col);
                if v.norm() > best {
                    best = v.norm();
                    pivot = v;
                }
            }
            let phase = pivot.conj() / C64::new(pivot.norm(), 0.0);
            let w = lambda.sqrt();
            for i in 0..n {
                vec[r * n + i] = e.vectors.get(i, col) * phase * C64::new(w, 0.0);
            }
        }
        // Clamped tiny negatives can leave the norm a hair off one;
        // renormalize so downstream fidelity stays exact.
        let norm: Real = vec.iter().map(|z| z.norm_sqr()).sum::<Real>().sqrt();
        for z in vec.iter_mut() {
            *z /= C64::new(norm, 0.0);
        }
        Ok((joint, vec))
    }
}

/// Gibbs state `exp(-beta H) / Z` of a Hermitian Hamiltonian.
///
/// The spectrum is shifted by its minimum before exponentiation, which
/// leaves the state invariant and avoids overflow at large `beta`.
pub fn gibbs(space: CompositeSpace, hamiltonian: &CMatrix, beta: Real) -> Result<DensityMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::OutOfRange { context: format!("inverse temperature {}", beta) });
    }
    if hamiltonian.rows() != space.total_dim() {
        return Err(Error::dim(format!(
            "Hamiltonian is {}x{}, space {} has dimension {}",
            hamiltonian.rows(),
            hamiltonian.cols(),
            space,
            space.total_dim()
        )));
    }
    let e = hermitian_eig(hamiltonian, tol::HERMITIAN)?;
    let ground = e.eigenvalues[0];
    let weights: Vec<Real> = e.eigenvalues.iter().map(|&l| (-beta * (l - ground)).exp()).collect();
    let z: Real = weights.iter().sum();
    let mat = matrix_function(hamiltonian, tol::HERMITIAN, 0.0, |l| {
        (-beta * (l - ground)).exp() / z
    })?;
    DensityMatrix::from_parts(space, mat)
}

/// Excited-state population of a thermal two-level system with level
/// splitting `eps` at inverse temperature `beta`: `1 / (1 + exp(beta eps))`.
pub fn thermal_qubit_population(beta_eps: Real) -> Real {
    let u = (-beta_eps).exp();
    u / (1.0 + u)
}

/// Entropy (nats) of a thermal two-level system, written as
/// `ln(1 + u) + beta*eps * u / (1 + u)` with `u = exp(-beta eps)`.
///
/// The compensated form stays accurate deep in the frozen regime where the
/// excited population underflows any direct `-p ln p - (1-p) ln(1-p)`
/// evaluation: at `beta*eps = 100` the entropy is about `3.8e-42` nats and
/// comes out to full relative precision.
pub fn thermal_qubit_entropy(beta_eps: Real) -> Real {
    let u = (-beta_eps).exp();
    u.ln_1p() + beta_eps * u / (1.0 + u)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(a) b sqrt(a)))^2` between two states on
/// the same space.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<Real> {
    if a.space() != b.space() {
        return Err(Error::dim(format!("fidelity between {} and {}", a.space(), b.space())));
    }
    let sqrt_a = matrix_function(a.matrix(), tol::HERMITIAN, tol::ZERO_CUTOFF, |l| {
        if l <= 0.0 {
            0.0
        } else {
            l.sqrt()
        }
    })?;
    let mut inner = sqrt_a.matmul(b.matrix()).matmul(&sqrt_a);
    inner.hermitize();
    let e = hermitian_eig(&inner, tol::HERMITIAN)?;
    let root_sum: Real = e.eigenvalues.iter().map(|&l| if l <= 0.0 { 0.0 } else { l.sqrt() }).sum();
    Ok(root_sum * root_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit(label: &str) -> CompositeSpace {
        CompositeSpace::single(label, 2)
    }

    fn c(re: Real, im: Real) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validation_catches_bad_states() {
        let sp = qubit("a");
        // trace 2
        let m = CMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(sp.clone(), m),
            Err(Error::NotNormalized { .. })
        ));
        // negative eigenvalue, trace 1
        let neg = CMatrix::from_diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(sp.clone(), neg), Err(Error::NotPSD { .. })));
        // non-Hermitian
        let nh = CMatrix::from_vec(
            2,
            2,
            vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::new(sp, nh),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn reduce_and_expectation_on_product() {
        let a = DensityMatrix::new(qubit("a"), CMatrix::from_diagonal(&[0.25, 0.75])).unwrap();
        let b = DensityMatrix::new(qubit("b"), CMatrix::from_diagonal(&[0.9, 0.1])).unwrap();
        let ab = a.tensor(&b).unwrap();
        let back = ab.reduce(&["a"]).unwrap();
        assert!(back.matrix().max_diff(a.matrix()) < 1e-14);

        let z = CMatrix::from_diagonal(&[1.0, -1.0]);
        let ez = ab.expectation(&z, &["b"]).unwrap();
        assert!((ez - 0.8).abs() < 1e-14);
    }

    #[test]
    fn expectation_handles_listed_order() {
        // <Z_a X_b> on |0>_a |+>_b = 1.
        let plus = [c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)];
        let a = DensityMatrix::basis_state(qubit("a"), 0).unwrap();
        let b = DensityMatrix::pure(qubit("b"), &plus).unwrap();
        let ab = a.tensor(&b).unwrap();
        let z = CMatrix::from_diagonal(&[1.0, -1.0]);
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let xz = crate::linalg::kron(&x, &z); // on (b, a)
        let v = ab.expectation(&xz, &["b", "a"]).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn apply_unitary_flips_basis_state() {
        let sp = CompositeSpace::new(&[("a", 2), ("b", 2)]).unwrap();
        let st = DensityMatrix::basis_state(sp, 0).unwrap(); // |00>
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let flipped = st.apply_unitary(&x, &["b"]).unwrap(); // |01>
        assert!((flipped.matrix().get(1, 1).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn permute_matches_tensor_order() {
        let a = DensityMatrix::new(qubit("a"), CMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        let b = DensityMatrix::new(qubit("b"), CMatrix::from_diagonal(&[0.6, 0.4])).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ba = ab.permute(&["b", "a"]).unwrap();
        let expected = b.tensor(&a).unwrap();
        assert_eq!(ba.space().labels(), vec!["b", "a"]);
        assert!(ba.matrix().max_diff(expected.matrix()) < 1e-14);
    }

    #[test]
    fn gibbs_two_level_populations() {
        let sp = qubit("s");
        let h = CMatrix::from_diagonal(&[0.0, 1.0]);
        let beta = 1.3;
        let g = gibbs(sp, &h, beta).unwrap();
        let expected = thermal_qubit_population(beta);
        assert!((g.matrix().get(1, 1).re - expected).abs() < 1e-14);
        assert!((g.matrix().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gibbs_survives_deep_freeze() {
        // beta*eps = 100: populations near 3.7e-44 must come out exactly,
        // not underflow to zero or overflow the exponential.
        let sp = qubit("s");
        let h = CMatrix::from_diagonal(&[0.0, 1.0]);
        let g = gibbs(sp, &h, 100.0).unwrap();
        let p = g.matrix().get(1, 1).re;
        assert!((p / 3.720075976020836e-44 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_entropy_matches_frozen_values() {
        // Degenerate splitting: ln 2.
        assert!((thermal_qubit_entropy(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        // Moderate regime.
        assert!((thermal_qubit_entropy(5.0) / 4.0179603110542346e-2 - 1.0).abs() < 1e-13);
        // Frozen regime: relative accuracy at 1e-42 scale.
        assert!((thermal_qubit_entropy(100.0) / 3.7572767357810443e-42 - 1.0).abs() < 1e-13);
        assert!((thermal_qubit_entropy(101.0) / 1.3959102605973301e-42 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn purify_bell_from_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(qubit("s"));
        let (sp, vec) = rho.purify("r").unwrap();
        assert_eq!(sp.labels(), vec!["r", "s"]);
        assert_eq!(vec.len(), 4);
        let joint = DensityMatrix::pure(sp, &vec).unwrap();
        let marginal = joint.reduce(&["s"]).unwrap();
        assert!(marginal.matrix().max_diff(rho.matrix()) < 1e-13);
        let ref_marginal = joint.reduce(&["r"]).unwrap();
        assert!((ref_marginal.matrix().get(0, 0).re - 0.5).abs() < 1e-13);
    }

    #[test]
    fn purify_pure_state_leaves_reference_unentangled() {
        let st = DensityMatrix::basis_state(qubit("s"), 1).unwrap();
        let (sp, vec) = st.purify("r").unwrap();
        // Reference keeps the full system dimension but carries no weight
        // beyond its first basis direction.
        assert_eq!(sp.dims(), vec![2, 2]);
        assert!((vec[1].re - 1.0).abs() < 1e-13);
        assert!(vec[2].norm() < 1e-13 && vec[3].norm() < 1e-13);
    }

    #[test]
    fn purification_weights_descend() {
        let rho =
            DensityMatrix::new(qubit("s"), CMatrix::from_diagonal(&[0.2, 0.8])).unwrap();
        let (_, vec) = rho.purify("r").unwrap();
        // Reference index 0 carries the largest weight.
        let w0: Real = vec[0..2].iter().map(|z| z.norm_sqr()).sum();
        let w1: Real = vec[2..4].iter().map(|z| z.norm_sqr()).sum();
        assert!((w0 - 0.8).abs() < 1e-13);
        assert!((w1 - 0.2).abs() < 1e-13);
    }

    #[test]
    fn gibbs_commutes_with_hamiltonian() {
        // Off-diagonal Hamiltonian: the Gibbs state must share its
        // eigenbasis, i.e. the commutator vanishes.
        let h = CMatrix::from_vec(
            2,
            2,
            vec![c(1.0, 0.0), c(0.4, 0.3), c(0.4, -0.3), c(-0.5, 0.0)],
        )
        .unwrap();
        let g = gibbs(qubit("s"), &h, 0.9).unwrap();
        let comm = g.matrix().matmul(&h).sub(&h.matmul(g.matrix()));
        assert!(comm.max_abs() < 1e-10);
    }

    #[test]
    fn fidelity_extremes_and_symmetry() {
        let s0 = DensityMatrix::basis_state(qubit("s"), 0).unwrap();
        let s1 = DensityMatrix::basis_state(qubit("s"), 1).unwrap();
        assert!((fidelity(&s0, &s0).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&s0, &s1).unwrap() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(qubit("s"));
        let f = fidelity(&s0, &mixed).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
        let g = fidelity(&mixed, &s0).unwrap();
        assert!((f - g).abs() < 1e-12);
    }
}
