//! Completely positive maps in Kraus form, quantum instruments, indirect
//! measurement models, and the thermal dilation behind the noise stage.
//!
//! A channel stores its Kraus operators together with the input and output
//! factor layouts. Instruments are outcome-indexed families of subnormalized
//! channels whose sum is trace preserving; their joint action appends the
//! classical outcome register as the fastest tensor factor.

use crate::entropy::{
    checked_prob, relative_entropy, shannon, von_neumann, EntropyValue,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, partial_trace};
use crate::space::CompositeSpace;
use crate::state::{gibbs, DensityMatrix};
use crate::{tol, CMatrix, Real, C64};

/// Pauli X on one qubit.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static shape")
}

/// `|index><index|` on `dim` levels.
pub fn basis_projector(dim: usize, index: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m.set(index, index, C64::new(1.0, 0.0));
    m
}

/// Cyclic shift by `amount` on `dim` levels: `|k> -> |k + amount mod dim>`.
pub fn shift_unitary(dim: usize, amount: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == (j + amount) % dim {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Checks that `projectors` is a complete family of mutually orthogonal
/// projectors on dimension `dim`.
pub fn require_projective(projectors: &[CMatrix], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::NotProjective { context: "empty projector family".into() });
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        if p.rows() != dim || p.cols() != dim {
            return Err(Error::dim(format!(
                "projector {} is {}x{}, expected dimension {}",
                i,
                p.rows(),
                p.cols(),
                dim
            )));
        }
        if p.hermitian_asymmetry() > tol::PROJECTOR {
            return Err(Error::NotProjective { context: format!("element {} is not Hermitian", i) });
        }
        let idem = p.matmul(p).max_diff(p);
        if idem > tol::PROJECTOR {
            return Err(Error::NotProjective {
                context: format!("element {} is not idempotent (defect {:.3e})", i, idem),
            });
        }
        for (j, q) in projectors.iter().enumerate().take(i) {
            let overlap = p.matmul(q).max_abs();
            if overlap > tol::PROJECTOR {
                return Err(Error::NotProjective {
                    context: format!("elements {} and {} overlap ({:.3e})", j, i, overlap),
                });
            }
        }
        sum = sum.add(p);
    }
    let completeness = sum.max_diff(&CMatrix::identity(dim));
    if completeness > tol::PROJECTOR {
        return Err(Error::NotProjective {
            context: format!("family does not resolve the identity (defect {:.3e})", completeness),
        });
    }
    Ok(())
}

fn kraus_gram(kraus: &[CMatrix], dim: usize) -> CMatrix {
    let mut g = CMatrix::zeros(dim, dim);
    for k in kraus {
        g = g.add(&k.adjoint().matmul(k));
    }
    g.hermitize();
    g
}

/// Position of the image of the identity relative to the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitalityClass {
    Unital,
    Subunital,
    Superunital,
    Neither,
}

/// Completely positive map in Kraus form between two labeled spaces.
///
/// Construction enforces trace non-increase, `sum K'K <= I` up to tolerance,
/// and flags the map trace preserving when the sum matches the identity.
/// Adjoints are exempt from the cap: the adjoint of a trace-preserving map
/// is unital, not trace non-increasing.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    input: CompositeSpace,
    output: CompositeSpace,
    kraus: Vec<CMatrix>,
    tp_gap: Real,
}

impl KrausChannel {
    pub fn new(input: CompositeSpace, output: CompositeSpace, kraus: Vec<CMatrix>) -> Result<Self> {
        let din = input.total_dim();
        let dout = output.total_dim();
        if kraus.is_empty() {
            return Err(Error::dim("a channel needs at least one Kraus operator"));
        }
        for k in &kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::dim(format!(
                    "Kraus operator is {}x{} but the channel maps dimension {} to {}",
                    k.rows(),
                    k.cols(),
                    din,
                    dout
                )));
            }
        }
        let gram = kraus_gram(&kraus, din);
        let top = *hermitian_eig(&gram, tol::HERMITIAN)?
            .eigenvalues
            .last()
            .expect("nonzero dimension");
        if top > 1.0 + tol::CHANNEL {
            return Err(Error::NotTraceNonIncreasing { excess: top - 1.0 });
        }
        let tp_gap = gram.max_diff(&CMatrix::identity(din));
        Ok(Self { input, output, kraus, tp_gap })
    }

    fn unvalidated(input: CompositeSpace, output: CompositeSpace, kraus: Vec<CMatrix>) -> Self {
        let tp_gap =
            kraus_gram(&kraus, input.total_dim()).max_diff(&CMatrix::identity(input.total_dim()));
        Self { input, output, kraus, tp_gap }
    }

    /// Conjugation channel of a unitary.
    pub fn unitary(space: CompositeSpace, u: CMatrix) -> Result<Self> {
        if u.rows() != space.total_dim() || !u.is_square() {
            return Err(Error::dim(format!(
                "unitary is {}x{} on a space of dimension {}",
                u.rows(),
                u.cols(),
                space.total_dim()
            )));
        }
        let defect = u.unitarity_defect();
        if defect > tol::UNITARY {
            return Err(Error::Validation(format!("matrix is not unitary (defect {:.3e})", defect)));
        }
        Self::new(space.clone(), space, vec![u])
    }

    pub fn input(&self) -> &CompositeSpace {
        &self.input
    }

    pub fn output(&self) -> &CompositeSpace {
        &self.output
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// True when `sum K'K = I` within tolerance.
    pub fn is_trace_preserving(&self) -> bool {
        self.tp_gap <= tol::CHANNEL
    }

    fn gram(&self) -> CMatrix {
        kraus_gram(&self.kraus, self.input.total_dim())
    }

    fn check_input_dim(&self, m: &CMatrix) -> Result<()> {
        let din = self.input.total_dim();
        if m.rows() != din || m.cols() != din {
            return Err(Error::dim(format!(
                "argument is {}x{}, channel input dimension is {}",
                m.rows(),
                m.cols(),
                din
            )));
        }
        Ok(())
    }

    /// Linear action `sum K M K'` on a raw matrix. No hermitization, so the
    /// map extends to non-Hermitian arguments (adjoint trace identities).
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_input_dim(m)?;
        let dout = self.output.total_dim();
        let mut out = CMatrix::zeros(dout, dout);
        for k in &self.kraus {
            out = out.add(&k.matmul(m).matmul(&k.adjoint()));
        }
        Ok(out)
    }

    /// Applies a trace-preserving channel to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if !self.is_trace_preserving() {
            return Err(Error::NotTracePreserving { max_deviation: self.tp_gap });
        }
        if rho.space() != &self.input {
            return Err(Error::dim(format!(
                "state lives on {} but the channel expects {}",
                rho.space(),
                self.input
            )));
        }
        let mut out = self.apply_matrix(rho.matrix())?;
        out.hermitize();
        DensityMatrix::new(self.output.clone(), out)
    }

    /// Branch action `(weight, sum K rho K')`: hermitized, not normalized.
    pub fn apply_weighted(&self, rho: &DensityMatrix) -> Result<(Real, CMatrix)> {
        let mut out = self.apply_matrix(rho.matrix())?;
        out.hermitize();
        let w = out.trace().re;
        Ok((w, out))
    }

    /// Adjoint map with Kraus set `{K'}`; satisfies
    /// `tr[M N(X)] = tr[adjoint(N)(M) X]`.
    pub fn adjoint(&self) -> KrausChannel {
        Self::unvalidated(
            self.output.clone(),
            self.input.clone(),
            self.kraus.iter().map(|k| k.adjoint()).collect(),
        )
    }

    /// Classifies the spectrum of `N(I) - I`. The slack is the eigenvalue of
    /// largest magnitude. Strictly superunital channels cannot pass
    /// construction (trace non-increase forces `tr N(I) <= dim`), but
    /// adjoint-built maps can land in any class.
    pub fn unitality_class(&self) -> Result<(UnitalityClass, Real)> {
        let mut n_of_i = self.apply_matrix(&CMatrix::identity(self.input.total_dim()))?;
        n_of_i.hermitize();
        let diff = n_of_i.sub(&CMatrix::identity(self.output.total_dim()));
        let eig = hermitian_eig(&diff, tol::HERMITIAN)?;
        let lo = eig.eigenvalues[0];
        let hi = *eig.eigenvalues.last().expect("nonzero dimension");
        let slack = if lo.abs() > hi.abs() { lo } else { hi };
        let class = match (lo >= -tol::CHANNEL, hi <= tol::CHANNEL) {
            (true, true) => UnitalityClass::Unital,
            (true, false) => UnitalityClass::Superunital,
            (false, true) => UnitalityClass::Subunital,
            (false, false) => UnitalityClass::Neither,
        };
        Ok((class, slack))
    }

    /// Back-projected input `adjoint(N)(N(rho))`; its trace is the efficacy.
    pub fn back_projected(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        let forward = self.apply_matrix(rho.matrix())?;
        let mut back = self.adjoint().apply_matrix(&forward)?;
        back.hermitize();
        Ok(back)
    }

    /// Efficacy `tr[adjoint(N)(N(rho))]`.
    pub fn efficacy(&self, rho: &DensityMatrix) -> Result<Real> {
        Ok(self.back_projected(rho)?.trace().re)
    }

    /// Choi matrix `sum vec(K) vec(K)'` with row-major vectorization (output
    /// index slow). Two channels are equal iff their Choi matrices agree,
    /// which makes this the basis-independent equality oracle.
    pub fn choi(&self) -> CMatrix {
        let n = self.output.total_dim() * self.input.total_dim();
        let mut c = CMatrix::zeros(n, n);
        for k in &self.kraus {
            let v = k.data();
            for (r, vr) in v.iter().enumerate() {
                if vr.re == 0.0 && vr.im == 0.0 {
                    continue;
                }
                for (s, vs) in v.iter().enumerate() {
                    let cur = c.get(r, s);
                    c.set(r, s, cur + vr * vs.conj());
                }
            }
        }
        c
    }
}

/// Outcome-indexed family of subnormalized channels summing to a
/// trace-preserving map.
#[derive(Clone, Debug)]
pub struct QuantumInstrument {
    space: CompositeSpace,
    branches: Vec<KrausChannel>,
}

impl QuantumInstrument {
    pub fn new(branches: Vec<KrausChannel>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::dim("an instrument needs at least one branch"));
        }
        let space = branches[0].input().clone();
        for b in &branches {
            if b.input() != &space || b.output() != &space {
                return Err(Error::dim(format!("every branch must map {} to itself", space)));
            }
        }
        let din = space.total_dim();
        let mut gram = CMatrix::zeros(din, din);
        for b in &branches {
            gram = gram.add(&b.gram());
        }
        let dev = gram.max_diff(&CMatrix::identity(din));
        if dev > tol::CHANNEL {
            return Err(Error::NotTracePreserving { max_deviation: dev });
        }
        Ok(Self { space, branches })
    }

    /// Projective instrument from a complete orthogonal projector family.
    pub fn projective(space: CompositeSpace, projectors: Vec<CMatrix>) -> Result<Self> {
        require_projective(&projectors, space.total_dim())?;
        let branches = projectors
            .into_iter()
            .map(|p| KrausChannel::new(space.clone(), space.clone(), vec![p]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(branches)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn outcome_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[KrausChannel] {
        &self.branches
    }

    /// Outcome weights `tr[N_x(rho)]`.
    pub fn outcome_distribution(&self, rho: &DensityMatrix) -> Result<Vec<Real>> {
        self.branches.iter().map(|b| Ok(b.apply_weighted(rho)?.0)).collect()
    }

    /// Posterior ensemble `(p_x, theta_x)`. Outcomes lighter than the block
    /// floor carry a maximally mixed placeholder; every consumer weights by
    /// the returned probability, so a placeholder never contributes above
    /// the floor.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<Vec<(Real, DensityMatrix)>> {
        self.branches
            .iter()
            .map(|b| {
                let (w, raw) = b.apply_weighted(rho)?;
                if w < tol::BLOCK_WEIGHT {
                    return Ok((w, DensityMatrix::maximally_mixed(self.space.clone())));
                }
                Ok((w, DensityMatrix::new(self.space.clone(), raw.scale(1.0 / w))?))
            })
            .collect()
    }

    /// Expected post-measurement state `sum_x N_x(rho) (x) |x><x|` on
    /// system tensor register.
    pub fn instrument_apply(&self, rho: &DensityMatrix, register: &str) -> Result<DensityMatrix> {
        let m = self.branches.len();
        let joint_space = self.space.tensor(&CompositeSpace::single(register, m))?;
        let d = self.space.total_dim();
        let mut out = CMatrix::zeros(d * m, d * m);
        for (x, b) in self.branches.iter().enumerate() {
            let (_, raw) = b.apply_weighted(rho)?;
            for i in 0..d {
                for j in 0..d {
                    out.set(i * m + x, j * m + x, raw.get(i, j));
                }
            }
        }
        DensityMatrix::new(joint_space, out)
    }

    /// All branches merged into the unconditional channel `sum_x N_x`.
    pub fn total_channel(&self) -> KrausChannel {
        let kraus = self.branches.iter().flat_map(|b| b.kraus().iter().cloned()).collect();
        KrausChannel::unvalidated(self.space.clone(), self.space.clone(), kraus)
    }

    /// Joint system to system-tensor-register channel writing the outcome
    /// into the appended register.
    pub fn joint_channel(&self, register: &str) -> Result<KrausChannel> {
        let m = self.branches.len();
        let out_space = self.space.tensor(&CompositeSpace::single(register, m))?;
        let d = self.space.total_dim();
        let mut kraus = Vec::new();
        for (x, b) in self.branches.iter().enumerate() {
            for k in b.kraus() {
                let mut j = CMatrix::zeros(d * m, d);
                for r in 0..d {
                    for c in 0..d {
                        j.set(r * m + x, c, k.get(r, c));
                    }
                }
                kraus.push(j);
            }
        }
        KrausChannel::new(self.space.clone(), out_space, kraus)
    }
}

/// Expected entropy reduction `H(rho) - sum_x p_x H(theta_x)`; negative for
/// smearing instruments.
pub fn groenewold_gain(inst: &QuantumInstrument, rho: &DensityMatrix) -> Result<Real> {
    let prior = von_neumann(rho)?;
    let mut posterior = 0.0;
    for (w, state) in inst.apply(rho)? {
        if w < tol::BLOCK_WEIGHT {
            continue;
        }
        posterior += w * von_neumann(&state)?;
    }
    Ok(prior - posterior)
}

/// Slack of the information-gain bound
/// `I_G <= H(Y) - D(rho || adjoint(N) o N(rho))`, evaluated on the joint
/// system-to-system-tensor-register channel; nonnegative up to tolerance for
/// every instrument. An infinite divergence reading means the support
/// overlap fell below numerical resolution (in exact arithmetic the
/// back-projected input always retains the input's support), so the sentinel
/// is passed through rather than turned into a verdict.
pub fn gain_bound_gap(inst: &QuantumInstrument, rho: &DensityMatrix) -> Result<EntropyValue> {
    let register = fresh_label(inst.space(), "y");
    let joint = inst.joint_channel(&register)?;
    let h_y = shannon(&inst.outcome_distribution(rho)?)?;
    let gain = groenewold_gain(inst, rho)?;
    match relative_entropy(rho.matrix(), &joint.back_projected(rho)?)? {
        EntropyValue::Finite(d) => Ok(EntropyValue::Finite(h_y - d - gain)),
        EntropyValue::Infinite => Ok(EntropyValue::Infinite),
    }
}

pub(crate) fn fresh_label(space: &CompositeSpace, base: &str) -> String {
    let mut label = base.to_string();
    while space.contains(&label) {
        label.push('\'');
    }
    label
}

/// Indirect measurement model: a thermal apparatus, a joint interaction
/// unitary, and a pointer readout on the apparatus. The interaction acts on
/// system tensor apparatus with the system as the slow factor.
#[derive(Clone, Debug)]
pub struct IndirectMeasurementModel {
    system: CompositeSpace,
    apparatus_state: DensityMatrix,
    apparatus_hamiltonian: CMatrix,
    unitary: CMatrix,
    pointer_projectors: Vec<CMatrix>,
}

impl IndirectMeasurementModel {
    pub fn new(
        system: CompositeSpace,
        apparatus_state: DensityMatrix,
        apparatus_hamiltonian: CMatrix,
        unitary: CMatrix,
        pointer_projectors: Vec<CMatrix>,
    ) -> Result<Self> {
        // Also rejects label collisions between system and apparatus.
        system.tensor(apparatus_state.space())?;
        let da = system.total_dim();
        let dm = apparatus_state.dim();
        if apparatus_hamiltonian.rows() != dm || !apparatus_hamiltonian.is_square() {
            return Err(Error::dim(format!(
                "apparatus Hamiltonian is {}x{} on a {}-level apparatus",
                apparatus_hamiltonian.rows(),
                apparatus_hamiltonian.cols(),
                dm
            )));
        }
        apparatus_hamiltonian.require_hermitian(tol::HERMITIAN)?;
        if unitary.rows() != da * dm || !unitary.is_square() {
            return Err(Error::dim(format!(
                "interaction is {}x{} on a joint dimension {}",
                unitary.rows(),
                unitary.cols(),
                da * dm
            )));
        }
        let defect = unitary.unitarity_defect();
        if defect > tol::UNITARY {
            return Err(Error::Validation(format!(
                "interaction is not unitary (defect {:.3e})",
                defect
            )));
        }
        require_projective(&pointer_projectors, dm)?;
        Ok(Self { system, apparatus_state, apparatus_hamiltonian, unitary, pointer_projectors })
    }

    pub fn system(&self) -> &CompositeSpace {
        &self.system
    }

    pub fn apparatus_state(&self) -> &DensityMatrix {
        &self.apparatus_state
    }

    pub fn apparatus_hamiltonian(&self) -> &CMatrix {
        &self.apparatus_hamiltonian
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn pointer_projectors(&self) -> &[CMatrix] {
        &self.pointer_projectors
    }

    pub fn outcome_count(&self) -> usize {
        self.pointer_projectors.len()
    }

    /// Joint state after the interaction, `U (rho (x) sigma^M) U'`.
    pub fn post_interaction(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.space() != &self.system {
            return Err(Error::dim(format!(
                "state lives on {} but the model expects {}",
                rho.space(),
                self.system
            )));
        }
        let joint = rho.tensor(&self.apparatus_state)?;
        let labels: Vec<&str> = joint.space().labels();
        joint.apply_unitary(&self.unitary, &labels)
    }

    /// Unnormalized pointer-outcome block of a joint state:
    /// `(I (x) P_x) theta (I (x) P_x)`.
    pub fn projected_block(&self, joint: &DensityMatrix, x: usize) -> Result<CMatrix> {
        if x >= self.pointer_projectors.len() {
            return Err(Error::OutOfRange { context: format!("pointer outcome {}", x) });
        }
        let proj = kron(&CMatrix::identity(self.system.total_dim()), &self.pointer_projectors[x]);
        let mut block = joint.matrix().conjugate_by(&proj);
        block.hermitize();
        Ok(block)
    }

    /// Compresses the dilation into the induced instrument with Kraus
    /// `sqrt(q_m) (I (x) <j|) U (I (x) |m>)`, `|m>` over the apparatus
    /// eigenbasis and `|j>` over each pointer projector's range.
    pub fn induced_instrument(&self) -> Result<QuantumInstrument> {
        let da = self.system.total_dim();
        let dm = self.apparatus_state.dim();
        let app = hermitian_eig(self.apparatus_state.matrix(), tol::HERMITIAN)?;
        let mut prepared: Vec<(Real, Vec<C64>)> = Vec::new();
        for (idx, &q) in app.eigenvalues.iter().enumerate() {
            if q > tol::BLOCK_WEIGHT {
                prepared.push((q.sqrt(), (0..dm).map(|r| app.vectors.get(r, idx)).collect()));
            }
        }
        let mut branches = Vec::with_capacity(self.pointer_projectors.len());
        for p in &self.pointer_projectors {
            let readout = projector_range_basis(p)?;
            let mut kraus = Vec::with_capacity(prepared.len() * readout.len());
            for (root, m_vec) in &prepared {
                for j_vec in &readout {
                    let k = CMatrix::from_fn(da, da, |a, b| {
                        let mut acc = C64::new(0.0, 0.0);
                        for (mu, j_amp) in j_vec.iter().enumerate() {
                            if j_amp.re == 0.0 && j_amp.im == 0.0 {
                                continue;
                            }
                            let bra = j_amp.conj();
                            for (nu, m_amp) in m_vec.iter().enumerate() {
                                acc += bra * self.unitary.get(a * dm + mu, b * dm + nu) * m_amp;
                            }
                        }
                        acc * root
                    });
                    kraus.push(k);
                }
            }
            branches.push(KrausChannel::new(self.system.clone(), self.system.clone(), kraus)?);
        }
        QuantumInstrument::new(branches)
    }

    /// Largest deviation between the induced instrument's branch outputs and
    /// the dilation formula evaluated directly, over all outcomes.
    pub fn branch_reproduction_error(&self, rho: &DensityMatrix) -> Result<Real> {
        let inst = self.induced_instrument()?;
        let post = self.post_interaction(rho)?;
        let dims = [self.system.total_dim(), self.apparatus_state.dim()];
        let mut worst: Real = 0.0;
        for (x, branch) in inst.branches().iter().enumerate() {
            let (_, induced) = branch.apply_weighted(rho)?;
            let direct = partial_trace(&self.projected_block(&post, x)?, &dims, &[0])?;
            worst = worst.max(induced.max_diff(&direct));
        }
        Ok(worst)
    }
}

/// Orthonormal basis of a projector's range.
fn projector_range_basis(p: &CMatrix) -> Result<Vec<Vec<C64>>> {
    let eig = hermitian_eig(p, tol::PROJECTOR)?;
    let n = p.rows();
    let mut basis = Vec::new();
    for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 0.5 {
            basis.push((0..n).map(|r| eig.vectors.get(r, idx)).collect());
        }
    }
    Ok(basis)
}

/// Pointer dilation of a projective instrument: a ladder apparatus with
/// `level_spacing` between consecutive levels (0 for the degenerate
/// pointer), prepared thermal at inverse temperature `beta` and shifted by
/// the outcome, `U = sum_y Pi_y (x) Shift_y`, with readout in the ladder
/// basis.
///
/// The degenerate pointer never moves its apparatus marginal but smears the
/// conditional branches; a strongly gapped pointer reproduces the projective
/// branches at the cost of an apparatus marginal that ends outcome-weighted.
pub fn dilate_projective_instrument(
    inst: &QuantumInstrument,
    pointer_label: &str,
    level_spacing: Real,
    beta: Real,
) -> Result<IndirectMeasurementModel> {
    if level_spacing < 0.0 || !level_spacing.is_finite() {
        return Err(Error::OutOfRange { context: format!("level spacing {}", level_spacing) });
    }
    let d = inst.space().total_dim();
    let m = inst.outcome_count();
    let mut projectors = Vec::with_capacity(m);
    for (x, b) in inst.branches().iter().enumerate() {
        if b.kraus().len() != 1 {
            return Err(Error::NotProjective {
                context: format!("branch {} has {} Kraus operators", x, b.kraus().len()),
            });
        }
        projectors.push(b.kraus()[0].clone());
    }
    require_projective(&projectors, d)?;
    let energies: Vec<Real> = (0..m).map(|k| level_spacing * k as Real).collect();
    let h_m = CMatrix::from_diagonal(&energies);
    let sigma = gibbs(CompositeSpace::single(pointer_label, m), &h_m, beta)?;
    let mut u = CMatrix::zeros(d * m, d * m);
    for (y, p) in projectors.iter().enumerate() {
        u = u.add(&kron(p, &shift_unitary(m, y)));
    }
    let pointer = (0..m).map(|x| basis_projector(m, x)).collect();
    IndirectMeasurementModel::new(inst.space().clone(), sigma, h_m, u, pointer)
}

/// Thermal realization of a one-qubit channel: a joint unitary on data
/// tensor bath with the bath prepared thermal for its own Hamiltonian.
#[derive(Clone, Debug)]
pub struct ThermalDilation {
    unitary: CMatrix,
    bath_state: DensityMatrix,
    bath_hamiltonian: CMatrix,
}

impl ThermalDilation {
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn bath_state(&self) -> &DensityMatrix {
        &self.bath_state
    }

    pub fn bath_hamiltonian(&self) -> &CMatrix {
        &self.bath_hamiltonian
    }

    /// Channel obtained by compressing the dilation against the bath,
    /// `rho -> tr_B[U (rho (x) tau) U']`.
    pub fn induced_channel(&self, data_space: &CompositeSpace) -> Result<KrausChannel> {
        let d = data_space.total_dim();
        let db = self.bath_state.dim();
        if self.unitary.rows() != d * db {
            return Err(Error::dim(format!(
                "dilation unitary is {}x{} but data dimension {} and bath dimension {} need {}",
                self.unitary.rows(),
                self.unitary.cols(),
                d,
                db,
                d * db
            )));
        }
        let bath = hermitian_eig(self.bath_state.matrix(), tol::HERMITIAN)?;
        let mut kraus = Vec::new();
        for (idx, &q) in bath.eigenvalues.iter().enumerate() {
            if q <= tol::BLOCK_WEIGHT {
                continue;
            }
            let root = q.sqrt();
            for j in 0..db {
                let k = CMatrix::from_fn(d, d, |a, b| {
                    let mut acc = C64::new(0.0, 0.0);
                    for nu in 0..db {
                        acc += self.unitary.get(a * db + j, b * db + nu) * bath.vectors.get(nu, idx);
                    }
                    acc * root
                });
                kraus.push(k);
            }
        }
        KrausChannel::new(data_space.clone(), data_space.clone(), kraus)
    }

    /// Bath marginal after the interaction with `data`.
    pub fn bath_marginal_after(&self, data: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = data.tensor(&self.bath_state)?;
        let labels: Vec<&str> = joint.space().labels();
        let after = joint.apply_unitary(&self.unitary, &labels)?;
        let bath_label = self.bath_state.space().labels()[0];
        after.reduce(&[bath_label])
    }

    /// Bath energy drawn across the interaction, `tr[H_B (tau' - tau)]`.
    pub fn bath_energy_change(&self, data: &DensityMatrix) -> Result<Real> {
        let before = self.bath_state.matrix().trace_product(&self.bath_hamiltonian).re;
        let after =
            self.bath_marginal_after(data)?.matrix().trace_product(&self.bath_hamiltonian).re;
        Ok(after - before)
    }

    /// Max entry of `[U, H_data (x) I + I (x) H_B]`; zero for an exact
    /// thermal operation.
    pub fn thermality_diagnostic(&self, data_hamiltonian: &CMatrix) -> Real {
        let db = self.bath_state.dim();
        let d = self.unitary.rows() / db;
        let total = kron(data_hamiltonian, &CMatrix::identity(db))
            .add(&kron(&CMatrix::identity(d), &self.bath_hamiltonian));
        self.unitary.matmul(&total).sub(&total.matmul(&self.unitary)).max_abs()
    }
}

/// Bit-flip channel `(1-p)(.) + p X(.)X` together with its thermal
/// realization, a control unitary `U = I (x) P_ground + X (x) P_excited`
/// against a bath whose excited manifold carries population `p`.
///
/// With degeneracy `g` the bath has one ground level and `g` excited levels
/// at the energy solving `g e^(-beta eps) / (1 + g e^(-beta eps)) = p`,
/// which needs `p <= g/(1+g)`; `g = 1` covers `p <= 1/2`. At `p = 0` the
/// spacing is capped at the exponential underflow threshold, pinning the
/// bath to its exact ground state.
pub fn thermal_operation_bitflip(
    p: Real,
    beta: Real,
    degeneracy: usize,
    data_label: &str,
    bath_label: &str,
) -> Result<(KrausChannel, ThermalDilation)> {
    let p = checked_prob(p)?;
    if degeneracy == 0 {
        return Err(Error::OutOfRange { context: "bath degeneracy 0".into() });
    }
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::OutOfRange { context: format!("inverse temperature {}", beta) });
    }
    let g = degeneracy as Real;
    if p > g / (g + 1.0) + tol::TRACE {
        return Err(Error::InvalidProbability {
            context: format!(
                "bit-flip probability {} exceeds g/(g+1) = {} for bath degeneracy {}",
                p,
                g / (g + 1.0),
                degeneracy
            ),
        });
    }
    let beta_eps =
        if p == 0.0 { 800.0 } else { (g * (1.0 - p) / p).ln().clamp(0.0, 800.0) };
    let eps = beta_eps / beta;
    let db = degeneracy + 1;
    let mut energies = vec![eps; db];
    energies[0] = 0.0;
    let h_b = CMatrix::from_diagonal(&energies);
    let tau = gibbs(CompositeSpace::single(bath_label, db), &h_b, beta)?;
    let p0 = basis_projector(db, 0);
    let p1 = CMatrix::identity(db).sub(&p0);
    let u = kron(&CMatrix::identity(2), &p0).add(&kron(&pauli_x(), &p1));
    let data_space = CompositeSpace::single(data_label, 2);
    let kraus = vec![CMatrix::identity(2).scale((1.0 - p).sqrt()), pauli_x().scale(p.sqrt())];
    let channel = KrausChannel::new(data_space.clone(), data_space, kraus)?;
    Ok((channel, ThermalDilation { unitary: u, bath_state: tau, bath_hamiltonian: h_b }))
}
