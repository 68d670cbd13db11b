//! Entropic quantities in nats: Shannon and von Neumann entropies,
//! conditional and mutual informations, and quantum relative entropy.
//!
//! Conventions throughout: natural logarithms, `0 ln 0 = 0`, and Boltzmann's
//! constant set to one, so entropies and heats divided by temperature share
//! units. Relative entropies can be genuinely infinite (support mismatch),
//! which is carried as an explicit value rather than as `f64::INFINITY` so
//! serialization and arithmetic stay deliberate.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, partial_trace};
use crate::state::DensityMatrix;
use crate::{tol, CMatrix, Real};
use serde::{Serialize, Serializer};

/// A relative entropy: finite, or infinite due to support mismatch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyValue {
    Finite(Real),
    Infinite,
}

impl EntropyValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, EntropyValue::Finite(_))
    }

    pub fn value(&self) -> Option<Real> {
        match self {
            EntropyValue::Finite(v) => Some(*v),
            EntropyValue::Infinite => None,
        }
    }

    /// Unwrap a value the caller has proven finite.
    pub fn expect_finite(&self, context: &str) -> Result<Real> {
        self.value().ok_or_else(|| Error::InfiniteSentinel { context: context.to_string() })
    }
}

impl std::fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntropyValue::Finite(v) => write!(f, "{}", v),
            EntropyValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EntropyValue::Finite(v) => s.serialize_f64(*v),
            EntropyValue::Infinite => s.serialize_str("inf"),
        }
    }
}

pub(crate) fn checked_prob(p: Real) -> Result<Real> {
    if !(-tol::TRACE..=1.0 + tol::TRACE).contains(&p) {
        return Err(Error::InvalidProbability { context: format!("{} outside [0, 1]", p) });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Binary entropy `-p ln p - (1-p) ln(1-p)` in nats.
pub fn binary_entropy(p: Real) -> Result<Real> {
    let p = checked_prob(p)?;
    let term = |x: Real| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    Ok(term(p) + term(1.0 - p))
}

/// Shannon entropy of a probability vector in nats. The vector must be
/// normalized within the trace tolerance.
pub fn shannon(probs: &[Real]) -> Result<Real> {
    let mut total = 0.0;
    let mut h = 0.0;
    for &p in probs {
        let p = checked_prob(p)?;
        total += p;
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    if (total - 1.0).abs() > tol::TRACE {
        return Err(Error::NotNormalized { norm: total });
    }
    Ok(h)
}

/// Von Neumann entropy of a density matrix given as a bare operator,
/// by eigendecomposition. Eigenvalues below the zero cutoff are treated
/// as exact zeros.
pub fn von_neumann_dense(m: &CMatrix) -> Result<Real> {
    let e = hermitian_eig(m, tol::HERMITIAN)?;
    let mut h = 0.0;
    for &l in &e.eigenvalues {
        if l > tol::ZERO_CUTOFF {
            h -= l * l.ln();
        } else if l < -tol::PSD_FLOOR * (1.0 + m.max_abs()) {
            return Err(Error::NotPSD { min_eigenvalue: l });
        }
    }
    Ok(h)
}

/// Von Neumann entropy of a labeled state.
///
/// Before diagonalizing, the state is recursively split across tensor-factor
/// cuts where it is an exact product (elementwise within the product-split
/// tolerance): entropy is additive across such cuts, and diagonalizing the
/// factors separately is both faster and better conditioned. The split
/// threshold is far below every quoted tolerance, so the continuity bound on
/// the split error is negligible.
pub fn von_neumann(state: &DensityMatrix) -> Result<Real> {
    split_entropy(state.matrix(), &state.space().dims())
}

fn split_entropy(m: &CMatrix, dims: &[usize]) -> Result<Real> {
    if dims.len() > 1 {
        let threshold = tol::PRODUCT_SPLIT * (1.0 + m.max_abs());
        for cut in 1..dims.len() {
            let left_idx: Vec<usize> = (0..cut).collect();
            let right_idx: Vec<usize> = (cut..dims.len()).collect();
            let left = partial_trace(m, dims, &left_idx)?;
            let right = partial_trace(m, dims, &right_idx)?;
            if kron(&left, &right).max_diff(m) <= threshold {
                return Ok(split_entropy(&left, &dims[..cut])?
                    + split_entropy(&right, &dims[cut..])?);
            }
        }
    }
    von_neumann_dense(m)
}

/// `H(A|B) = H(AB) - H(B)` on the subsystems named by the label lists.
/// `a` and `b` must be disjoint; `b` may be empty (plain subsystem entropy).
pub fn conditional_entropy(state: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<Real> {
    for l in a {
        if b.contains(l) {
            return Err(Error::UnknownLabel { label: format!("label '{}' on both sides", l) });
        }
    }
    let joint: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    let h_joint = von_neumann(&state.reduce(&joint)?)?;
    if b.is_empty() {
        return Ok(h_joint);
    }
    let h_b = von_neumann(&state.reduce(b)?)?;
    Ok(h_joint - h_b)
}

/// `I(A:B) = H(A) + H(B) - H(AB)`.
pub fn mutual_information(state: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<Real> {
    let h_a = conditional_entropy(state, a, &[])?;
    let h_b = conditional_entropy(state, b, &[])?;
    let joint: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    let h_ab = conditional_entropy(state, &joint, &[])?;
    Ok(h_a + h_b - h_ab)
}

/// `I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C)`.
pub fn conditional_mutual_information(
    state: &DensityMatrix,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<Real> {
    let ac: Vec<&str> = a.iter().chain(c.iter()).copied().collect();
    let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
    let abc: Vec<&str> = a.iter().chain(b.iter()).chain(c.iter()).copied().collect();
    let h_ac = conditional_entropy(state, &ac, &[])?;
    let h_bc = conditional_entropy(state, &bc, &[])?;
    let h_abc = conditional_entropy(state, &abc, &[])?;
    let h_c = if c.is_empty() { 0.0 } else { conditional_entropy(state, c, &[])? };
    Ok(h_ac + h_bc - h_abc - h_c)
}

/// Quantum relative entropy `D(rho || sigma) = tr[rho ln rho] - tr[rho ln sigma]`.
///
/// Infinite when `rho` places more than rounding-level mass on the numerical
/// null space of `sigma`; mass below that threshold is discarded as rounding.
pub fn relative_entropy(rho: &CMatrix, sigma: &CMatrix) -> Result<EntropyValue> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::dim("relative entropy of mismatched operators".to_string()));
    }
    let e_rho = hermitian_eig(rho, tol::HERMITIAN)?;
    let e_sig = hermitian_eig(sigma, tol::HERMITIAN)?;
    let n = rho.rows();

    let mut tr_rho_ln_rho = 0.0;
    for &l in &e_rho.eigenvalues {
        if l > tol::ZERO_CUTOFF {
            tr_rho_ln_rho += l * l.ln();
        }
    }

    // q_j = <w_j| rho |w_j> for each eigenvector of sigma.
    let mut cross = 0.0;
    let mut null_mass = 0.0;
    let mut w = vec![crate::C64::new(0.0, 0.0); n];
    for j in 0..n {
        for (i, slot) in w.iter_mut().enumerate() {
            *slot = e_sig.vectors.get(i, j);
        }
        let rw = rho.apply_vec(&w);
        let mut q = 0.0;
        for i in 0..n {
            q += (w[i].conj() * rw[i]).re;
        }
        let q = q.max(0.0);
        let mu = e_sig.eigenvalues[j];
        if mu > tol::ZERO_CUTOFF {
            cross += q * mu.ln();
        } else {
            null_mass += q;
        }
    }
    if null_mass > tol::RELATIVE_SUPPORT {
        return Ok(EntropyValue::Infinite);
    }
    Ok(EntropyValue::Finite(tr_rho_ln_rho - cross))
}

/// Relative entropy to the Gibbs state of `hamiltonian` at inverse
/// temperature `beta`, evaluated analytically as
/// `-H(rho) + beta tr[rho H] + ln Z`.
///
/// This path never touches the Gibbs populations themselves, so it stays
/// exact deep in the frozen regime where they underflow eigensolver
/// resolution (for instance `beta eps = 100`, populations near `4e-44`).
/// The result is always finite: Gibbs states have full support.
pub fn relative_entropy_vs_gibbs(
    rho: &DensityMatrix,
    hamiltonian: &CMatrix,
    beta: Real,
) -> Result<Real> {
    if hamiltonian.rows() != rho.dim() {
        return Err(Error::dim("Hamiltonian dimension does not match state".to_string()));
    }
    let h_rho = von_neumann(rho)?;
    let energy = rho.matrix().trace_product(hamiltonian).re;
    let e = hermitian_eig(hamiltonian, tol::HERMITIAN)?;
    let ground = e.eigenvalues[0];
    let z_shifted: Real = e.eigenvalues.iter().map(|&l| (-beta * (l - ground)).exp()).sum();
    let ln_z = z_shifted.ln() - beta * ground;
    Ok(-h_rho + beta * energy + ln_z)
}

/// Slack of the quantum Fano inequality: entropy exchange is bounded by
/// `h(F_e) + (1 - F_e) ln(d^2 - 1)` for a process with entanglement
/// fidelity `F_e` on a `d`-dimensional purified system. Returns
/// `h(F_e) + (1 - F_e) ln(d^2 - 1) - S_e`; the bound holds when this is
/// nonnegative up to slack tolerance.
pub fn fano_gap(entanglement_fidelity: Real, dim: usize, entropy_exchange: Real) -> Result<Real> {
    if dim < 2 {
        return Err(Error::OutOfRange { context: format!("purified dimension {}", dim) });
    }
    if entropy_exchange < -tol::INEQ_SLACK {
        return Err(Error::OutOfRange {
            context: format!("negative entropy exchange {}", entropy_exchange),
        });
    }
    let fe = checked_prob(entanglement_fidelity)?;
    let bound = binary_entropy(fe)? + (1.0 - fe) * ((dim * dim - 1) as Real).ln();
    Ok(bound - entropy_exchange)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::CompositeSpace;
    use crate::state::{gibbs, thermal_qubit_entropy};
    use crate::C64;

    fn qubit(l: &str) -> CompositeSpace {
        CompositeSpace::single(l, 2)
    }

    #[test]
    fn binary_entropy_oracles() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        // h(0.01) in nats, frozen high-precision value.
        assert!((binary_entropy(0.01).unwrap() - 5.6001534354847340e-2).abs() < 1e-15);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn shannon_oracles() {
        let h = shannon(&[0.25; 4]).unwrap();
        assert!((h - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
        // Syndrome distribution at flip probability 0.01:
        // {0.970299 + 1e-6, 3 x 0.0099}.
        let p0 = 0.99f64.powi(3) + 0.01f64.powi(3);
        let py = 0.01 * 0.99;
        let h = shannon(&[p0, py, py, py]).unwrap();
        assert!((h - 1.6632657213413735e-1).abs() < 1e-15);
        assert!(shannon(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn von_neumann_pure_and_mixed() {
        let pure = DensityMatrix::basis_state(qubit("s"), 0).unwrap();
        assert!(von_neumann(&pure).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(qubit("s"));
        assert!((von_neumann(&mixed).unwrap() - std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn von_neumann_splits_products() {
        // Three-factor product with one entangled-looking mixed factor:
        // entropy must equal the sum of factor entropies.
        let a = DensityMatrix::new(qubit("a"), CMatrix::from_diagonal(&[0.2, 0.8])).unwrap();
        let b = DensityMatrix::maximally_mixed(qubit("b"));
        let c3 = DensityMatrix::new(
            CompositeSpace::single("c", 3),
            CMatrix::from_diagonal(&[0.5, 0.3, 0.2]),
        )
        .unwrap();
        let prod = a.tensor(&b).unwrap().tensor(&c3).unwrap();
        let expected = von_neumann(&a).unwrap() + std::f64::consts::LN_2
            + shannon(&[0.5, 0.3, 0.2]).unwrap();
        assert!((von_neumann(&prod).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn entangled_state_does_not_split() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let sp = CompositeSpace::new(&[("a", 2), ("b", 2)]).unwrap();
        let bell = DensityMatrix::pure(
            sp,
            &[C64::new(inv, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(inv, 0.0)],
        )
        .unwrap();
        assert!(von_neumann(&bell).unwrap().abs() < 1e-12);
        // Marginals are maximally mixed, so H(A|B) = -ln 2 < 0.
        let hab = conditional_entropy(&bell, &["a"], &["b"]).unwrap();
        assert!((hab + std::f64::consts::LN_2).abs() < 1e-12);
        let i = mutual_information(&bell, &["a"], &["b"]).unwrap();
        assert!((i - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn cmi_vanishes_on_markov_product() {
        // rho_ABC = rho_AC tensor rho_B has I(A:B|C) = 0.
        let ac = DensityMatrix::maximally_mixed(CompositeSpace::new(&[("a", 2), ("c", 2)]).unwrap());
        let b = DensityMatrix::new(qubit("b"), CMatrix::from_diagonal(&[0.7, 0.3])).unwrap();
        let full = ac.tensor(&b).unwrap();
        let v = conditional_mutual_information(&full, &["a"], &["b"], &["c"]).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_known_qubit_pair() {
        // D(diag(0.5,0.5) || diag(0.25,0.75))
        //   = 0.5 ln(0.5/0.25) + 0.5 ln(0.5/0.75).
        let rho = CMatrix::from_diagonal(&[0.5, 0.5]);
        let sig = CMatrix::from_diagonal(&[0.25, 0.75]);
        let expected = 0.5 * (2.0f64).ln() + 0.5 * (2.0f64 / 3.0).ln();
        match relative_entropy(&rho, &sig).unwrap() {
            EntropyValue::Finite(v) => assert!((v - expected).abs() < 1e-13),
            EntropyValue::Infinite => panic!("finite divergence expected"),
        }
    }

    #[test]
    fn relative_entropy_detects_support_mismatch() {
        let rho = CMatrix::from_diagonal(&[0.5, 0.5]);
        let sig = CMatrix::from_diagonal(&[1.0, 0.0]);
        assert_eq!(relative_entropy(&rho, &sig).unwrap(), EntropyValue::Infinite);
        // Reversed: rho inside supp(sigma) is fine.
        let v = relative_entropy(&sig, &CMatrix::from_diagonal(&[0.5, 0.5])).unwrap();
        assert!((v.value().unwrap() - std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn relative_entropy_nonnegative_on_random_pairs() {
        let mut rng = crate::random::seeded_rng(5);
        for _ in 0..20 {
            let a = crate::random::random_density(4, &mut rng);
            let b = crate::random::random_density(4, &mut rng);
            let d = relative_entropy(&a, &b).unwrap().value().unwrap();
            assert!(d > -tol::INEQ_SLACK, "negative divergence {}", d);
        }
    }

    #[test]
    fn gibbs_relative_entropy_paths_agree() {
        // Moderate temperature: generic eigenpath and analytic path match.
        let sp = qubit("s");
        let h = CMatrix::from_diagonal(&[0.0, 1.0]);
        let beta = 1.7;
        let tau = gibbs(sp.clone(), &h, beta).unwrap();
        let rho =
            DensityMatrix::new(sp.clone(), CMatrix::from_diagonal(&[0.85, 0.15])).unwrap();
        let generic = relative_entropy(rho.matrix(), tau.matrix()).unwrap().value().unwrap();
        let analytic = relative_entropy_vs_gibbs(&rho, &h, beta).unwrap();
        assert!((generic - analytic).abs() < 1e-11);
    }

    #[test]
    fn gibbs_relative_entropy_deep_freeze() {
        // At beta*eps = 100 the generic path is hopeless (populations are
        // 4e-44); the analytic path gives D(tau||tau) = 0 and a clean value
        // for the ground state.
        let sp = qubit("s");
        let h = CMatrix::from_diagonal(&[0.0, 1.0]);
        let tau = gibbs(sp.clone(), &h, 100.0).unwrap();
        let self_d = relative_entropy_vs_gibbs(&tau, &h, 100.0).unwrap();
        assert!(self_d.abs() < 1e-12);

        let ground = DensityMatrix::basis_state(sp, 0).unwrap();
        let d = relative_entropy_vs_gibbs(&ground, &h, 100.0).unwrap();
        // D(|0><0| || tau) = -ln(1 - p1) = ln(1 + e^{-100}) ~ 3.72e-44,
        // indistinguishable from zero in f64 sums; what matters is that the
        // value is tiny and positive rather than infinite or NaN.
        assert!(d >= 0.0 && d < 1e-12);
        // Against the excited state the divergence is the full 100 nats
        // minus the entropy-like tail.
        let excited = DensityMatrix::basis_state(qubit("s"), 1).unwrap();
        let d1 = relative_entropy_vs_gibbs(&excited, &h, 100.0).unwrap();
        assert!((d1 - 100.0).abs() < 1e-10);
    }

    #[test]
    fn thermal_entropy_consistency_with_dense_path() {
        // Moderate regime where the dense eigenpath still resolves the
        // populations: the compensated scalar formula must agree.
        let sp = qubit("s");
        let h = CMatrix::from_diagonal(&[0.0, 1.0]);
        let beta = 5.0;
        let tau = gibbs(sp, &h, beta).unwrap();
        let dense = von_neumann(&tau).unwrap();
        let scalar = thermal_qubit_entropy(beta);
        assert!((dense - scalar).abs() < 1e-13);
    }

    #[test]
    fn fano_gap_oracles() {
        assert_eq!(fano_gap(1.0, 4, 0.0).unwrap(), 0.0);
        let v = fano_gap(0.5, 2, 0.0).unwrap();
        assert!((v - 1.2424533248940002).abs() < 1e-15);
        let saturating = fano_gap(0.5, 2, 1.2424533248940002).unwrap();
        assert!(saturating.abs() < 1e-15);
        assert!(fano_gap(1.5, 2, 0.0).is_err());
        assert!(fano_gap(0.5, 1, 0.0).is_err());
        assert!(fano_gap(0.5, 2, -1.0).is_err());
    }

    #[test]
    fn entropy_value_serialization() {
        let fin = serde_json::to_string(&EntropyValue::Finite(0.25)).unwrap();
        assert_eq!(fin, "0.25");
        let inf = serde_json::to_string(&EntropyValue::Infinite).unwrap();
        assert_eq!(inf, "\"inf\"");
    }
}
