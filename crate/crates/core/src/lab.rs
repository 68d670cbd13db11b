//! Two-system unitary laboratory for the work and heat bookkeeping.
//!
//! A controllable system `A` sits next to an uncontrollable system `B`; the
//! pair evolves unitarily while the controllable terms of the Hamiltonian
//! follow a piecewise-constant protocol. Work is then a sum over switch
//! events, since between switches the in-force Hamiltonian generates the
//! evolution and the total energy is conserved, so the driving integrals
//! telescope exactly. Heat is the energy `B` gives up, and the internal
//! energy of `A` is the nonlocal reading that includes the interaction
//! term, which makes heat lost by `B` equal heat gained by `A` at any
//! coupling strength.
//!
//! On top of the ledger the module certifies the entropy-balance identity
//! relating the bath's energy-like reading to entropy changes, mutual
//! information and relative entropy, its thermal-bath specialization, the
//! Landauer bound, the first law with its nonequilibrium inequality form,
//! and the work-versus-free-energy statement.

use crate::entropy::{mutual_information, relative_entropy, von_neumann};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eig;
use crate::space::CompositeSpace;
use crate::state::{gibbs, DensityMatrix};
use crate::{tol, C64, CMatrix, Real};

/// One event of a piecewise-constant protocol.
#[derive(Clone, Debug)]
pub enum ProtocolStep {
    /// Instantaneous change of the controllable terms: the local Hamiltonian
    /// of `A` and the interaction. Costs work, moves no state.
    Switch { h_a: CMatrix, v: CMatrix },
    /// Joint unitary generated by the Hamiltonian currently in force. Moves
    /// the state, costs no work.
    Evolve { unitary: CMatrix },
}

/// A controllable system next to an uncontrollable one, with the
/// piecewise-constant driving protocol and an optional declaration that the
/// second system started thermal.
#[derive(Clone, Debug)]
pub struct TwoSystemExperiment {
    initial: DensityMatrix,
    label_a: String,
    label_b: String,
    dim_a: usize,
    dim_b: usize,
    h_a0: CMatrix,
    h_b: CMatrix,
    v0: CMatrix,
    steps: Vec<ProtocolStep>,
    beta: Option<Real>,
}

/// Energy ledger of one protocol, with the two second-law slacks.
///
/// Signs: `work` is done on the pair through the controls, `heat` is
/// absorbed by `A` from `B`. Both slacks are nonnegative up to rounding
/// whenever the protocol is valid and `B` started thermal and uncorrelated;
/// they coincide because the free energy differs from the internal energy
/// by exactly the entropy term of the inequality.
#[derive(Clone, Copy, Debug)]
pub struct FirstLawReport {
    /// Nonlocal internal-energy change of `A`: local term plus interaction.
    pub delta_u: Real,
    /// Work injected at the switch events.
    pub work: Real,
    /// Heat absorbed by `A`, read off the bath's energy loss.
    pub heat: Real,
    /// Local entropy change of `A`.
    pub delta_h_a: Real,
    /// `delta_u - work - heat`; rounding residue of the telescoped ledger.
    pub first_law_defect: Real,
    /// `work + kT dH(A) - delta_u`, the nonequilibrium first-law margin.
    pub inequality_slack: Real,
    /// `work - dF(A)` with `F = U - kT H(A)`.
    pub thomson_slack: Real,
}

struct Trajectory {
    final_state: DensityMatrix,
    work: Real,
    h_a: CMatrix,
    v: CMatrix,
    max_drift: Real,
}

impl TwoSystemExperiment {
    /// Starts a protocol from `initial` over exactly two labeled factors,
    /// with the local Hamiltonians and the interaction in force at time
    /// zero. Operators are laid out on the factors in the state's order.
    pub fn new(
        initial: DensityMatrix,
        h_a0: CMatrix,
        h_b: CMatrix,
        v0: CMatrix,
    ) -> Result<Self> {
        let labels = initial.space().labels();
        if labels.len() != 2 {
            return Err(Error::dim(format!(
                "expected a two-factor state, got {} factors",
                labels.len()
            )));
        }
        let (label_a, label_b) = (labels[0].to_string(), labels[1].to_string());
        let dims = initial.space().dims();
        let (dim_a, dim_b) = (dims[0], dims[1]);
        check_term(&h_a0, dim_a, "local Hamiltonian of the controllable system")?;
        check_term(&h_b, dim_b, "local Hamiltonian of the uncontrollable system")?;
        check_term(&v0, dim_a * dim_b, "initial interaction")?;
        Ok(Self {
            initial,
            label_a,
            label_b,
            dim_a,
            dim_b,
            h_a0,
            h_b,
            v0,
            steps: Vec::new(),
            beta: None,
        })
    }

    /// Declares that the second factor was initialized thermal at inverse
    /// temperature `beta`; the claim itself is checked by the operations
    /// that rely on it.
    pub fn with_bath_temperature(mut self, beta: Real) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Validation(format!(
                "bath inverse temperature must be positive and finite, got {}",
                beta
            )));
        }
        self.beta = Some(beta);
        Ok(self)
    }

    /// Appends an instantaneous switch of the controllable terms.
    pub fn switch_to(mut self, h_a: CMatrix, v: CMatrix) -> Result<Self> {
        check_term(&h_a, self.dim_a, "switched local Hamiltonian")?;
        check_term(&v, self.dim_a * self.dim_b, "switched interaction")?;
        self.steps.push(ProtocolStep::Switch { h_a, v });
        Ok(self)
    }

    /// Appends a joint unitary evolution step.
    pub fn evolve(mut self, unitary: CMatrix) -> Result<Self> {
        let d = self.dim_a * self.dim_b;
        if unitary.rows() != d || unitary.cols() != d {
            return Err(Error::dim(format!(
                "evolution acts on dimension {}, state has {}",
                unitary.rows(),
                d
            )));
        }
        let defect = unitary.unitarity_defect();
        if defect > tol::UNITARY {
            return Err(Error::Validation(format!(
                "evolution step is not unitary (defect {:.3e})",
                defect
            )));
        }
        self.steps.push(ProtocolStep::Evolve { unitary });
        Ok(self)
    }

    pub fn initial_state(&self) -> &DensityMatrix {
        &self.initial
    }

    /// The state after the whole protocol; switches move nothing.
    pub fn final_state(&self) -> Result<DensityMatrix> {
        Ok(self.run()?.final_state)
    }

    fn on_a(&self) -> [&str; 1] {
        [self.label_a.as_str()]
    }

    fn on_b(&self) -> [&str; 1] {
        [self.label_b.as_str()]
    }

    fn on_ab(&self) -> [&str; 2] {
        [self.label_a.as_str(), self.label_b.as_str()]
    }

    fn controllable_energy(&self, sigma: &DensityMatrix, h_a: &CMatrix, v: &CMatrix) -> Result<Real> {
        Ok(sigma.expectation(h_a, &self.on_a())? + sigma.expectation(v, &self.on_ab())?)
    }

    fn total_energy(&self, sigma: &DensityMatrix, h_a: &CMatrix, v: &CMatrix) -> Result<Real> {
        Ok(self.controllable_energy(sigma, h_a, v)? + sigma.expectation(&self.h_b, &self.on_b())?)
    }

    fn run(&self) -> Result<Trajectory> {
        let mut sigma = self.initial.clone();
        let mut h_a = self.h_a0.clone();
        let mut v = self.v0.clone();
        let mut work = 0.0;
        let mut max_drift: Real = 0.0;
        for step in &self.steps {
            match step {
                ProtocolStep::Switch { h_a: next_h, v: next_v } => {
                    work += self.controllable_energy(&sigma, next_h, next_v)?
                        - self.controllable_energy(&sigma, &h_a, &v)?;
                    h_a = next_h.clone();
                    v = next_v.clone();
                }
                ProtocolStep::Evolve { unitary } => {
                    let before = self.total_energy(&sigma, &h_a, &v)?;
                    sigma = sigma.apply_unitary(unitary, &self.on_ab())?;
                    let after = self.total_energy(&sigma, &h_a, &v)?;
                    max_drift = max_drift.max((after - before).abs());
                }
            }
        }
        Ok(Trajectory { final_state: sigma, work, h_a, v, max_drift })
    }

    /// Checks the declarations the thermal identities lean on: thermal
    /// initialization of `B` for the declared temperature and an
    /// uncorrelated start. Returns the inverse temperature and the Gibbs
    /// reference.
    fn bath_hypotheses(&self) -> Result<(Real, DensityMatrix)> {
        let beta = self.beta.ok_or_else(|| Error::HypothesisViolated {
            index: 2,
            context: "no bath temperature was declared".to_string(),
        })?;
        let tau = gibbs(
            CompositeSpace::single(&self.label_b, self.dim_b),
            &self.h_b,
            beta,
        )?;
        let b0 = self.initial.reduce(&self.on_b())?;
        let deviation = b0.matrix().max_diff(tau.matrix());
        if deviation > tol::THERMAL_STATE {
            return Err(Error::HypothesisViolated {
                index: 2,
                context: format!(
                    "bath marginal deviates from its Gibbs state by {:.3e}",
                    deviation
                ),
            });
        }
        let i0 = mutual_information(&self.initial, &self.on_a(), &self.on_b())?;
        if i0 > tol::INEQ_SLACK {
            return Err(Error::HypothesisViolated {
                index: 3,
                context: format!("initial correlation I(A:B) = {:.3e}", i0),
            });
        }
        Ok((beta, tau))
    }
}

fn check_term(op: &CMatrix, dim: usize, what: &str) -> Result<()> {
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::dim(format!("{} is {}x{}, expected {}", what, op.rows(), op.cols(), dim)));
    }
    op.require_hermitian(tol::HERMITIAN)
}

/// The unitary `exp(-i h s)` generated by a constant Hamiltonian.
pub fn free_evolution(h: &CMatrix, duration: Real) -> Result<CMatrix> {
    let e = hermitian_eig(h, tol::HERMITIAN)?;
    let n = h.rows();
    let mut u = CMatrix::zeros(n, n);
    for k in 0..n {
        let col: Vec<C64> = (0..n).map(|i| e.vectors.get(i, k)).collect();
        let phase = C64::from_polar(1.0, -e.eigenvalues[k] * duration);
        u = u.add(&CMatrix::outer(&col, &col).scale_complex(phase));
    }
    Ok(u)
}

/// Gap of the entropy-balance identity
/// `Tr[(b_0 - b_t) ln b_0] = -dH(A) + dI(A:B) + D(b_t || b_0)`,
/// where `b` is the marginal of the uncontrollable factor.
///
/// The left side reads the start marginal's logarithm as an effective
/// unitless Hamiltonian; no thermal assumption enters, and the initial
/// state may be correlated. Errors with the infinity sentinel when the
/// final marginal leaves the start marginal's support, since then both
/// sides diverge together.
pub fn entropy_balance(exp: &TwoSystemExperiment) -> Result<Real> {
    let sigma_t = exp.final_state()?;
    let b0 = exp.initial.reduce(&exp.on_b())?;
    let bt = sigma_t.reduce(&exp.on_b())?;

    let e0 = hermitian_eig(b0.matrix(), tol::HERMITIAN)?;
    let diff = b0.matrix().sub(bt.matrix());
    let n = b0.dim();
    let mut lhs = 0.0;
    let mut null_mass = 0.0;
    for k in 0..n {
        let col: Vec<C64> = (0..n).map(|i| e0.vectors.get(i, k)).collect();
        if e0.eigenvalues[k] > tol::ZERO_CUTOFF {
            let moved = diff.apply_vec(&col);
            let overlap: C64 = col.iter().zip(&moved).map(|(c, m)| c.conj() * m).sum();
            lhs += e0.eigenvalues[k].ln() * overlap.re;
        } else {
            let pushed = bt.matrix().apply_vec(&col);
            let mass: C64 = col.iter().zip(&pushed).map(|(c, m)| c.conj() * m).sum();
            null_mass += mass.re;
        }
    }
    if null_mass > tol::RELATIVE_SUPPORT {
        return Err(Error::InfiniteSentinel {
            context: "final bath marginal left the start marginal's support".to_string(),
        });
    }

    let dh_a = von_neumann(&sigma_t.reduce(&exp.on_a())?)?
        - von_neumann(&exp.initial.reduce(&exp.on_a())?)?;
    let di = mutual_information(&sigma_t, &exp.on_a(), &exp.on_b())?
        - mutual_information(&exp.initial, &exp.on_a(), &exp.on_b())?;
    let d = relative_entropy(bt.matrix(), b0.matrix())?
        .expect_finite("entropy balance against the start marginal")?;
    Ok(lhs - (-dh_a + di + d))
}

/// Local entropy changes against the correlation change: returns
/// `(dH(A) + dH(B), dI(A:B))`. The two coincide for any unitary protocol,
/// and are nonnegative whenever the start is a product.
pub fn entropy_sum_and_correlation_change(exp: &TwoSystemExperiment) -> Result<(Real, Real)> {
    let sigma_t = exp.final_state()?;
    let dh_a = von_neumann(&sigma_t.reduce(&exp.on_a())?)?
        - von_neumann(&exp.initial.reduce(&exp.on_a())?)?;
    let dh_b = von_neumann(&sigma_t.reduce(&exp.on_b())?)?
        - von_neumann(&exp.initial.reduce(&exp.on_b())?)?;
    let di = mutual_information(&sigma_t, &exp.on_a(), &exp.on_b())?
        - mutual_information(&exp.initial, &exp.on_a(), &exp.on_b())?;
    Ok((dh_a + dh_b, di))
}

/// Gap of the thermal-bath balance
/// `beta Q = -dH(A) + I(A:B)_t + D(b_t || tau)`, with `Q` the energy
/// dissipated into the bath.
///
/// Requires the declared thermal initialization and an uncorrelated start;
/// either failing reports which hypothesis broke. The Landauer bound
/// `beta Q >= -dH(A)` follows because the two discarded terms are
/// nonnegative.
pub fn reeb_wolf(exp: &TwoSystemExperiment) -> Result<Real> {
    let (beta, tau) = exp.bath_hypotheses()?;
    let sigma_t = exp.final_state()?;
    let bt = sigma_t.reduce(&exp.on_b())?;

    let q = sigma_t.expectation(&exp.h_b, &exp.on_b())?
        - exp.initial.expectation(&exp.h_b, &exp.on_b())?;
    let dh_a = von_neumann(&sigma_t.reduce(&exp.on_a())?)?
        - von_neumann(&exp.initial.reduce(&exp.on_a())?)?;
    let i_t = mutual_information(&sigma_t, &exp.on_a(), &exp.on_b())?;
    let d = relative_entropy(bt.matrix(), tau.matrix())?
        .expect_finite("thermal-bath balance against the Gibbs reference")?;
    Ok(beta * q - (-dh_a + i_t + d))
}

/// Runs the protocol and closes the energy ledger.
///
/// The work is the switch sum, the heat is the bath's energy loss, and the
/// internal energy of `A` carries the interaction term. Every evolution
/// step must conserve the Hamiltonian in force (the piecewise-constant
/// contract); a drifting step means the declared protocol could not have
/// generated that unitary, and is rejected. The inequality forms
/// additionally require the thermal, uncorrelated start.
pub fn first_law_report(exp: &TwoSystemExperiment) -> Result<FirstLawReport> {
    let (beta, _) = exp.bath_hypotheses()?;
    let traj = exp.run()?;
    if traj.max_drift > tol::INEQ_SLACK {
        return Err(Error::Validation(format!(
            "an evolution step drifted the in-force energy by {:.3e}; \
             not generated by the declared piecewise-constant Hamiltonian",
            traj.max_drift
        )));
    }
    let sigma_t = &traj.final_state;

    let delta_u = exp.controllable_energy(sigma_t, &traj.h_a, &traj.v)?
        - exp.controllable_energy(&exp.initial, &exp.h_a0, &exp.v0)?;
    let heat = exp.initial.expectation(&exp.h_b, &exp.on_b())?
        - sigma_t.expectation(&exp.h_b, &exp.on_b())?;
    let delta_h_a = von_neumann(&sigma_t.reduce(&exp.on_a())?)?
        - von_neumann(&exp.initial.reduce(&exp.on_a())?)?;

    let kt = 1.0 / beta;
    let delta_f = delta_u - kt * delta_h_a;
    Ok(FirstLawReport {
        delta_u,
        work: traj.work,
        heat,
        delta_h_a,
        first_law_defect: delta_u - traj.work - heat,
        inequality_slack: traj.work + kt * delta_h_a - delta_u,
        thomson_slack: traj.work - delta_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use crate::linalg::kron;
    use crate::random::{haar_unitary, random_density, seeded_rng};
    use crate::state::{thermal_qubit_entropy, thermal_qubit_population};
    use std::f64::consts::PI;

    fn qubit_h(gap: Real) -> CMatrix {
        CMatrix::from_diagonal(&[0.0, gap])
    }

    fn gibbs_qubit(label: &str, gap: Real, beta: Real) -> DensityMatrix {
        gibbs(CompositeSpace::single(label, 2), &qubit_h(gap), beta).unwrap()
    }

    fn swap_matrix() -> CMatrix {
        let pairs = [(0, 0), (1, 2), (2, 1), (3, 3)];
        let mut m = CMatrix::zeros(4, 4);
        for (r, c) in pairs {
            m.set(r, c, C64::new(1.0, 0.0));
        }
        m
    }

    fn partial_swap(theta: Real) -> CMatrix {
        CMatrix::identity(4)
            .scale(theta.cos())
            .add(&swap_matrix().scale_complex(C64::new(0.0, theta.sin())))
    }

    fn ab_space() -> CompositeSpace {
        CompositeSpace::new(&[("a", 2), ("b", 2)]).unwrap()
    }

    #[test]
    fn identity_protocol_is_trivial() {
        let beta = 0.7;
        let init = gibbs_qubit("a", 1.0, 2.0).tensor(&gibbs_qubit("b", 1.3, beta)).unwrap();
        let exp = TwoSystemExperiment::new(init, qubit_h(1.0), qubit_h(1.3), CMatrix::zeros(4, 4))
            .unwrap()
            .with_bath_temperature(beta)
            .unwrap()
            .evolve(CMatrix::identity(4))
            .unwrap();

        assert!(entropy_balance(&exp).unwrap().abs() <= 1e-12);
        assert!(reeb_wolf(&exp).unwrap().abs() <= 1e-12);

        let rep = first_law_report(&exp).unwrap();
        assert!(rep.delta_u.abs() <= 1e-12);
        assert!(rep.work.abs() <= 1e-12);
        assert!(rep.heat.abs() <= 1e-12);
        assert!(rep.first_law_defect.abs() <= 1e-12);
        // Nothing moved, so both inequality forms saturate exactly.
        assert!(rep.inequality_slack.abs() <= 1e-12);
        assert!(rep.thomson_slack.abs() <= 1e-12);
    }

    #[test]
    fn swap_between_gibbs_qubits_closes_balance() {
        let (gap_a, beta_a) = (1.0, 1.1);
        let (gap_b, beta_b) = (1.6, 0.5);
        let init = gibbs_qubit("a", gap_a, beta_a).tensor(&gibbs_qubit("b", gap_b, beta_b)).unwrap();
        let exp = TwoSystemExperiment::new(init, qubit_h(gap_a), qubit_h(gap_b), CMatrix::zeros(4, 4))
            .unwrap()
            .evolve(swap_matrix())
            .unwrap();

        let gap = entropy_balance(&exp).unwrap();
        assert!(gap.abs() <= 1e-9, "gap {:.3e}", gap);

        // Both sides in closed form from the two thermal populations: the
        // swap hands B the A populations, the start stays a product, and
        // the mutual information never appears.
        let qa = thermal_qubit_population(beta_a * gap_a);
        let qb = thermal_qubit_population(beta_b * gap_b);
        let lhs = (qa - qb) * ((1.0 - qb) / qb).ln();
        let d = (1.0 - qa) * ((1.0 - qa) / (1.0 - qb)).ln() + qa * (qa / qb).ln();
        let dh_a = thermal_qubit_entropy(beta_b * gap_b) - thermal_qubit_entropy(beta_a * gap_a);
        let rhs = -dh_a + d;
        assert!((lhs - rhs).abs() <= 1e-12, "analytic identity check");

        let sigma_t = exp.final_state().unwrap();
        let bt = sigma_t.reduce(&["b"]).unwrap();
        assert!(
            bt.matrix().max_diff(gibbs_qubit("b", gap_a, beta_a).matrix()) <= 1e-12,
            "swap must hand the bath the system's thermal populations"
        );
    }

    #[test]
    fn random_correlated_states_close_balance() {
        let mut rng = seeded_rng(0x1ab_0001);
        for trial in 0..8 {
            // Blend toward the maximally mixed state so the start marginal
            // keeps full numerical rank.
            let raw = random_density(4, &mut rng);
            let blended = raw.scale(0.9).add(&CMatrix::identity(4).scale(0.025));
            let init = DensityMatrix::new(ab_space(), blended).unwrap();
            let exp = TwoSystemExperiment::new(init, qubit_h(0.0), qubit_h(0.0), CMatrix::zeros(4, 4))
                .unwrap()
                .evolve(haar_unitary(4, &mut rng))
                .unwrap();

            let gap = entropy_balance(&exp).unwrap();
            assert!(gap.abs() <= 1e-9, "trial {}: gap {:.3e}", trial, gap);

            let (sum, di) = entropy_sum_and_correlation_change(&exp).unwrap();
            assert!((sum - di).abs() <= 1e-9, "trial {}: {} vs {}", trial, sum, di);
        }
    }

    #[test]
    fn product_starts_only_gain_correlation() {
        let mut rng = seeded_rng(0x1ab_0002);
        for trial in 0..8 {
            let a = DensityMatrix::new(CompositeSpace::single("a", 2), random_density(2, &mut rng))
                .unwrap();
            let b = DensityMatrix::new(CompositeSpace::single("b", 2), random_density(2, &mut rng))
                .unwrap();
            let exp = TwoSystemExperiment::new(
                a.tensor(&b).unwrap(),
                qubit_h(0.0),
                qubit_h(0.0),
                CMatrix::zeros(4, 4),
            )
            .unwrap()
            .evolve(haar_unitary(4, &mut rng))
            .unwrap();

            let (sum, di) = entropy_sum_and_correlation_change(&exp).unwrap();
            assert!((sum - di).abs() <= 1e-9);
            assert!(sum >= -tol::INEQ_SLACK, "trial {}: sum {:.3e}", trial, sum);
        }
    }

    #[test]
    fn partial_swap_against_thermal_bath() {
        let beta = 1.4;
        let gap_b = 0.9;
        let sys = DensityMatrix::new(
            CompositeSpace::single("a", 2),
            CMatrix::from_diagonal(&[0.85, 0.15]),
        )
        .unwrap();
        let bath = gibbs_qubit("b", gap_b, beta);
        let theta = PI / 5.0;
        let exp = TwoSystemExperiment::new(
            sys.tensor(&bath).unwrap(),
            qubit_h(0.9),
            qubit_h(gap_b),
            CMatrix::zeros(4, 4),
        )
        .unwrap()
        .with_bath_temperature(beta)
        .unwrap()
        .evolve(partial_swap(theta))
        .unwrap();

        let gap = reeb_wolf(&exp).unwrap();
        assert!(gap.abs() <= 1e-9, "gap {:.3e}", gap);

        // Diagonal inputs keep the partial swap classical: each marginal is
        // the convex blend of the two, so the dissipated heat has a closed
        // form, and the final state check pins the whole trajectory.
        let s2 = theta.sin() * theta.sin();
        let tau_e = thermal_qubit_population(beta * gap_b);
        let q_analytic = s2 * gap_b * (0.15 - tau_e);
        let sigma_t = exp.final_state().unwrap();
        let q = sigma_t.expectation(&qubit_h(gap_b), &["b"]).unwrap()
            - exp.initial_state().expectation(&qubit_h(gap_b), &["b"]).unwrap();
        assert!((q - q_analytic).abs() <= 1e-12);

        let blend = |p: Real, q: Real| (1.0 - s2) * p + s2 * q;
        let a_t = sigma_t.reduce(&["a"]).unwrap();
        let expect_a = CMatrix::from_diagonal(&[blend(0.85, 1.0 - tau_e), blend(0.15, tau_e)]);
        assert!(a_t.matrix().max_diff(&expect_a) <= 1e-12);

        // Landauer bound on the same data.
        let dh_a = von_neumann(&a_t).unwrap() - binary_entropy(0.15).unwrap();
        assert!(beta * q >= -dh_a - 1e-9);
    }

    #[test]
    fn thermal_hypotheses_are_checked() {
        let beta = 1.4;
        // Declared thermal but initialized flat.
        let flat = DensityMatrix::maximally_mixed(CompositeSpace::single("b", 2));
        let sys = DensityMatrix::basis_state(CompositeSpace::single("a", 2), 0).unwrap();
        let exp = TwoSystemExperiment::new(
            sys.tensor(&flat).unwrap(),
            qubit_h(1.0),
            qubit_h(1.0),
            CMatrix::zeros(4, 4),
        )
        .unwrap()
        .with_bath_temperature(beta)
        .unwrap();
        match reeb_wolf(&exp) {
            Err(Error::HypothesisViolated { index: 2, .. }) => {}
            other => panic!("expected a thermality violation, got {:?}", other),
        }

        // Thermal marginal, but classically correlated with the system.
        let gap_b = 1.0;
        let tau_e = thermal_qubit_population(beta * gap_b);
        let mut mat = CMatrix::zeros(4, 4);
        mat.set(0, 0, C64::new(1.0 - tau_e, 0.0));
        mat.set(3, 3, C64::new(tau_e, 0.0));
        let correlated = DensityMatrix::new(ab_space(), mat).unwrap();
        let exp = TwoSystemExperiment::new(correlated, qubit_h(1.0), qubit_h(gap_b), CMatrix::zeros(4, 4))
            .unwrap()
            .with_bath_temperature(beta)
            .unwrap();
        match reeb_wolf(&exp) {
            Err(Error::HypothesisViolated { index: 3, .. }) => {}
            other => panic!("expected a correlation violation, got {:?}", other),
        }

        // No declaration at all.
        let undeclared = TwoSystemExperiment::new(
            DensityMatrix::basis_state(ab_space(), 0).unwrap(),
            qubit_h(1.0),
            qubit_h(1.0),
            CMatrix::zeros(4, 4),
        )
        .unwrap();
        assert!(matches!(
            reeb_wolf(&undeclared),
            Err(Error::HypothesisViolated { index: 2, .. })
        ));
    }

    #[test]
    fn quench_costs_work_without_heat() {
        let beta = 2.0;
        let bath = gibbs_qubit("b", 1.0, beta);
        let sys = DensityMatrix::new(
            CompositeSpace::single("a", 2),
            CMatrix::from_fn(2, 2, |r, c| {
                let vals = [[0.6, 0.3], [0.3, 0.4]];
                C64::new(vals[r][c], 0.0)
            }),
        )
        .unwrap();
        let h_before = qubit_h(1.0);
        let h_after = qubit_h(1.5);
        let joint_after = kron(&h_after, &CMatrix::identity(2)).add(&kron(&CMatrix::identity(2), &qubit_h(1.0)));
        let exp = TwoSystemExperiment::new(
            sys.tensor(&bath).unwrap(),
            h_before.clone(),
            qubit_h(1.0),
            CMatrix::zeros(4, 4),
        )
        .unwrap()
        .with_bath_temperature(beta)
        .unwrap()
        .switch_to(h_after.clone(), CMatrix::zeros(4, 4))
        .unwrap()
        .evolve(free_evolution(&joint_after, 0.6).unwrap())
        .unwrap();

        let rep = first_law_report(&exp).unwrap();
        let w_direct = sys.expectation(&h_after.sub(&h_before), &["a"]).unwrap();
        assert!((rep.work - w_direct).abs() <= 1e-12);
        assert!(rep.heat.abs() <= 1e-12, "uncoupled evolution moves no heat");
        assert!(rep.delta_h_a.abs() <= 1e-12, "local unitary moves no entropy");
        assert!((rep.delta_u - rep.work).abs() <= 1e-9);
        assert!(rep.first_law_defect.abs() <= 1e-9);
        // With dH(A) = 0 and no heat the inequality saturates.
        assert!(rep.inequality_slack.abs() <= 1e-9);
        assert!(rep.thomson_slack.abs() <= 1e-9);
    }

    #[test]
    fn interaction_protocol_closes_the_ledger() {
        let beta = 1.2;
        let h_a = qubit_h(1.0);
        let h_b = qubit_h(1.3);
        let bath = gibbs_qubit("b", 1.3, beta);
        let sys = DensityMatrix::new(
            CompositeSpace::single("a", 2),
            CMatrix::from_fn(2, 2, |r, c| {
                let vals = [[0.7, 0.25], [0.25, 0.3]];
                C64::new(vals[r][c], 0.0)
            }),
        )
        .unwrap();
        let x = CMatrix::from_fn(2, 2, |r, c| C64::new(if r != c { 1.0 } else { 0.0 }, 0.0));
        let coupling = kron(&x, &x).scale(0.4);
        let joint = kron(&h_a, &CMatrix::identity(2))
            .add(&kron(&CMatrix::identity(2), &h_b))
            .add(&coupling);

        let exp = TwoSystemExperiment::new(sys.tensor(&bath).unwrap(), h_a.clone(), h_b.clone(), CMatrix::zeros(4, 4))
            .unwrap()
            .with_bath_temperature(beta)
            .unwrap()
            .switch_to(h_a.clone(), coupling.clone())
            .unwrap()
            .evolve(free_evolution(&joint, 0.9).unwrap())
            .unwrap()
            .switch_to(h_a.clone(), CMatrix::zeros(4, 4))
            .unwrap();

        let rep = first_law_report(&exp).unwrap();

        // The controls end where they started, so the work equals the
        // total-energy change of the pair.
        let sigma_t = exp.final_state().unwrap();
        let total = |st: &DensityMatrix| {
            st.expectation(&h_a, &["a"]).unwrap() + st.expectation(&h_b, &["b"]).unwrap()
        };
        let de_total = total(&sigma_t) - total(exp.initial_state());
        assert!((rep.work - de_total).abs() <= 1e-9, "{} vs {}", rep.work, de_total);

        assert!(rep.first_law_defect.abs() <= 1e-9);
        assert!(rep.inequality_slack >= -tol::INEQ_SLACK);
        assert!(rep.thomson_slack >= -tol::INEQ_SLACK);
        assert!((rep.inequality_slack - rep.thomson_slack).abs() <= 1e-12);
        // The coupling genuinely moved heat in this protocol.
        assert!(rep.heat.abs() > 1e-3);
    }

    #[test]
    fn drifting_evolution_is_rejected() {
        // A full swap against a detuned bath cannot be generated by the
        // declared static Hamiltonians: the ledger refuses to close.
        let beta = 1.0;
        let bath = gibbs_qubit("b", 1.6, beta);
        let sys = DensityMatrix::new(
            CompositeSpace::single("a", 2),
            CMatrix::from_diagonal(&[0.9, 0.1]),
        )
        .unwrap();
        let exp = TwoSystemExperiment::new(
            sys.tensor(&bath).unwrap(),
            qubit_h(1.0),
            qubit_h(1.6),
            CMatrix::zeros(4, 4),
        )
        .unwrap()
        .with_bath_temperature(beta)
        .unwrap()
        .evolve(swap_matrix())
        .unwrap();

        assert!(matches!(first_law_report(&exp), Err(Error::Validation(_))));
        // The entropy accounting has no Hamiltonian contract and still
        // closes on the same experiment.
        assert!(entropy_balance(&exp).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn pure_start_marginal_is_singular() {
        let sys = DensityMatrix::new(
            CompositeSpace::single("a", 2),
            CMatrix::from_diagonal(&[0.2, 0.8]),
        )
        .unwrap();
        let bath = DensityMatrix::basis_state(CompositeSpace::single("b", 2), 0).unwrap();
        let exp = TwoSystemExperiment::new(
            sys.tensor(&bath).unwrap(),
            qubit_h(1.0),
            qubit_h(1.0),
            CMatrix::zeros(4, 4),
        )
        .unwrap()
        .evolve(partial_swap(PI / 5.0))
        .unwrap();

        assert!(matches!(entropy_balance(&exp), Err(Error::InfiniteSentinel { .. })));
    }

    #[test]
    fn construction_rejects_bad_pieces() {
        let init = DensityMatrix::basis_state(ab_space(), 0).unwrap();
        assert!(matches!(
            TwoSystemExperiment::new(init.clone(), qubit_h(1.0), CMatrix::identity(3), CMatrix::zeros(4, 4)),
            Err(Error::DimensionMismatch { .. })
        ));

        let three = DensityMatrix::basis_state(
            CompositeSpace::new(&[("a", 2), ("b", 2), ("c", 2)]).unwrap(),
            0,
        )
        .unwrap();
        assert!(TwoSystemExperiment::new(
            three,
            qubit_h(1.0),
            qubit_h(1.0),
            CMatrix::zeros(8, 8)
        )
        .is_err());

        let exp = TwoSystemExperiment::new(init, qubit_h(1.0), qubit_h(1.0), CMatrix::zeros(4, 4))
            .unwrap();
        assert!(matches!(
            exp.clone().evolve(CMatrix::identity(4).scale(2.0)),
            Err(Error::Validation(_))
        ));
        assert!(exp.with_bath_temperature(-1.0).is_err());
    }

    #[test]
    fn free_evolution_generates_the_declared_hamiltonian() {
        let mut rng = seeded_rng(0x1ab_0003);
        let h = {
            let g = haar_unitary(4, &mut rng);
            let d = CMatrix::from_diagonal(&[0.3, 1.1, 1.7, 2.4]);
            g.matmul(&d).matmul(&g.adjoint())
        };
        let u = free_evolution(&h, 0.37).unwrap();
        assert!(u.unitarity_defect() <= 1e-10);
        // Composition law and energy conservation.
        let two = free_evolution(&h, 0.74).unwrap();
        assert!(u.matmul(&u).max_diff(&two) <= 1e-10);
        let conj = h.conjugate_by(&u);
        assert!(conj.max_diff(&h) <= 1e-10);
    }
}
