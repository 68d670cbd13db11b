//! Block-decomposed states over quantum factors plus classical registers.
//!
//! A [`QcState`] represents a density matrix on a labeled composite space
//! whose factors fall into three categories:
//!
//! * **classical** factors, diagonal in a fixed basis and perfectly
//!   correlated with nothing but the block index (measurement registers,
//!   and bath qubits after a collision with a sector-controlled unitary);
//! * **active** quantum factors, carried jointly as small dense blocks;
//! * **shared** product factors, uncorrelated with everything else.
//!
//! The global state is `sum_k w_k |k><k| (x) rho_k (x) (tensor of shared
//! factors)`, where `k` ranges over joint classical index assignments. This
//! is exact, not an approximation: every operation offered here maps states
//! of this form to states of this form, and each constructor verifies the
//! structural precondition it relies on (diagonal bath, blank register,
//! matching dimensions) instead of assuming it. Off-diagonal register
//! coherences are excluded by construction rather than checked after the
//! fact.
//!
//! The payoff is that entropies of arbitrary label subsets decompose into a
//! Shannon term over block weights plus small dense eigenproblems, so a full
//! cycle on nine qubit factors and two four-valued registers stays in the
//! millisecond range where the dense 8192-dimensional state would need
//! gigabytes.
//!
//! Blocks whose weight falls below [`tol::BLOCK_WEIGHT`] are dropped; the
//! lost mass is far below every tolerance used by the consumers.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::channel::QuantumInstrument;
use crate::entropy::{shannon, von_neumann, von_neumann_dense};
use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, permute_subsystems};
use crate::space::CompositeSpace;
use crate::state::DensityMatrix;
use crate::{tol, CMatrix, Real};

#[derive(Clone, Debug)]
struct Block {
    /// One index per classical factor, in the classical list's order.
    key: Vec<usize>,
    weight: Real,
    /// Normalized (unit trace) density matrix on the active space.
    state: CMatrix,
}

/// Density matrix block-diagonal over classical registers, with uncorrelated
/// product factors held separately. See the module docs for the invariants.
#[derive(Clone, Debug)]
pub struct QcState {
    /// Every label, in the canonical global order.
    master: Vec<String>,
    /// Classical factors `(label, dim)`, in master-relative order.
    classical: Vec<(String, usize)>,
    /// Joint space of the active quantum factors, in master-relative order.
    active: CompositeSpace,
    /// Single-factor product states, in master-relative order.
    shared: Vec<DensityMatrix>,
    blocks: Vec<Block>,
    /// Memo for `entropy_of`, keyed by the canonicalized label set. Entries
    /// stay valid because every operation returns a fresh state.
    cache: RefCell<HashMap<Vec<String>, Real>>,
}

enum Category {
    Classical(usize),
    Active,
    Shared(usize),
}

impl QcState {
    /// Product-form starting state: one block holding `active`, every
    /// classical factor at its initial index, and the given shared factors.
    ///
    /// `master` fixes the global factor order; it must list every label of
    /// the three categories exactly once. Shared factors must be
    /// single-factor states.
    pub fn new(
        master: &[&str],
        classical: &[(&str, usize, usize)],
        active: DensityMatrix,
        shared: Vec<DensityMatrix>,
    ) -> Result<Self> {
        let master: Vec<String> = master.iter().map(|l| l.to_string()).collect();
        {
            let mut sorted: Vec<&String> = master.iter().collect();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != master.len() {
                return Err(Error::Validation("master label list repeats a label".into()));
            }
        }
        let pos = |label: &str| -> Result<usize> {
            master.iter().position(|m| m == label).ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
            })
        };

        let mut seen: Vec<usize> = Vec::new();
        let mut classical_sorted: Vec<(usize, String, usize, usize)> = Vec::new();
        for (label, dim, index) in classical {
            if *dim == 0 {
                return Err(Error::dim(format!("classical factor '{}' has dimension 0", label)));
            }
            if index >= dim {
                return Err(Error::OutOfRange {
                    context: format!("initial index {} of classical factor '{}' (dim {})", index, label, dim),
                });
            }
            let p = pos(label)?;
            classical_sorted.push((p, label.to_string(), *dim, *index));
            seen.push(p);
        }
        classical_sorted.sort_by_key(|e| e.0);

        for l in active.space().labels() {
            seen.push(pos(l)?);
        }
        // Active factor order must already agree with the master order.
        let active_positions: Vec<usize> =
            active.space().labels().iter().map(|l| pos(l)).collect::<Result<_>>()?;
        if active_positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "active factors must be listed in master order".into(),
            ));
        }

        let mut shared_sorted: Vec<(usize, DensityMatrix)> = Vec::new();
        for s in shared {
            if s.space().len() != 1 {
                return Err(Error::Validation(format!(
                    "shared factor {:?} must cover exactly one label",
                    s.space().labels()
                )));
            }
            let p = pos(s.space().labels()[0])?;
            seen.push(p);
            shared_sorted.push((p, s));
        }
        shared_sorted.sort_by_key(|e| e.0);

        seen.sort_unstable();
        seen.dedup();
        if seen.len() != master.len() {
            return Err(Error::Validation(
                "every master label must belong to exactly one category".into(),
            ));
        }

        let key: Vec<usize> = classical_sorted.iter().map(|e| e.3).collect();
        let block = Block { key, weight: 1.0, state: active.matrix().clone() };
        Ok(Self {
            master,
            classical: classical_sorted.into_iter().map(|e| (e.1, e.2)).collect(),
            active: active.space().clone(),
            shared: shared_sorted.into_iter().map(|e| e.1).collect(),
            blocks: vec![block],
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn master_labels(&self) -> Vec<&str> {
        self.master.iter().map(|s| s.as_str()).collect()
    }

    pub fn active_space(&self) -> &CompositeSpace {
        &self.active
    }

    pub fn classical_labels(&self) -> Vec<&str> {
        self.classical.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn shared_labels(&self) -> Vec<&str> {
        self.shared.iter().map(|s| s.space().labels()[0]).collect()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Blocks as `(classical key, weight, state)`, for inspection in tests.
    pub fn blocks(&self) -> impl Iterator<Item = (&[usize], Real, &CMatrix)> {
        self.blocks.iter().map(|b| (b.key.as_slice(), b.weight, &b.state))
    }

    pub fn total_weight(&self) -> Real {
        self.blocks.iter().map(|b| b.weight).sum()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        match self.category(label)? {
            Category::Classical(i) => Ok(self.classical[i].1),
            Category::Active => self.active.dim_of(label),
            Category::Shared(i) => Ok(self.shared[i].dim()),
        }
    }

    fn master_index(&self, label: &str) -> Result<usize> {
        self.master
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| Error::UnknownLabel { label: label.to_string() })
    }

    fn category(&self, label: &str) -> Result<Category> {
        if let Some(i) = self.classical.iter().position(|(l, _)| l == label) {
            return Ok(Category::Classical(i));
        }
        if self.active.contains(label) {
            return Ok(Category::Active);
        }
        if let Some(i) = self.shared.iter().position(|s| s.space().labels()[0] == label) {
            return Ok(Category::Shared(i));
        }
        Err(Error::UnknownLabel { label: label.to_string() })
    }

    fn with_blocks(&self, mut blocks: Vec<Block>) -> Self {
        blocks.sort_by(|a, b| a.key.cmp(&b.key));
        Self {
            master: self.master.clone(),
            classical: self.classical.clone(),
            active: self.active.clone(),
            shared: self.shared.clone(),
            blocks,
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// Full structural check: weights form a distribution, keys are in range
    /// and unique, every block and shared factor is a valid density matrix.
    pub fn validate(&self) -> Result<()> {
        let mut total = 0.0;
        let mut keys: Vec<&[usize]> = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            if b.key.len() != self.classical.len() {
                return Err(Error::Validation("block key length mismatch".into()));
            }
            for (&k, (label, dim)) in b.key.iter().zip(&self.classical) {
                if k >= *dim {
                    return Err(Error::OutOfRange {
                        context: format!("index {} of classical factor '{}' (dim {})", k, label, dim),
                    });
                }
            }
            if b.weight < -tol::TRACE {
                return Err(Error::InvalidProbability {
                    context: format!("block weight {}", b.weight),
                });
            }
            total += b.weight;
            keys.push(&b.key);
            DensityMatrix::new(self.active.clone(), b.state.clone())?;
        }
        keys.sort();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate block key".into()));
        }
        if (total - 1.0).abs() > tol::TRACE {
            return Err(Error::NotNormalized { norm: total });
        }
        for s in &self.shared {
            s.validate()?;
        }
        Ok(())
    }

    /// Conjugate every block by a unitary on the listed active labels.
    pub fn apply_unitary(&self, u: &CMatrix, on: &[&str]) -> Result<Self> {
        if u.unitarity_defect() > tol::UNITARY {
            return Err(Error::Validation(format!(
                "operator on {:?} is not unitary (defect {:.3e})",
                on,
                u.unitarity_defect()
            )));
        }
        let embedded = self.active.embed(u, on)?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut s = b.state.conjugate_by(&embedded);
                s.hermitize();
                Block { key: b.key.clone(), weight: b.weight, state: s }
            })
            .collect();
        Ok(self.with_blocks(blocks))
    }

    /// Conjugate each block by a unitary selected from the block's indices
    /// of the listed classical control factors. `pick` receives the control
    /// indices in the listed order.
    pub fn apply_controlled_unitary(
        &self,
        controls: &[&str],
        on: &[&str],
        pick: impl Fn(&[usize]) -> CMatrix,
    ) -> Result<Self> {
        let positions: Vec<usize> = controls
            .iter()
            .map(|c| match self.category(c)? {
                Category::Classical(i) => Ok(i),
                _ => Err(Error::Validation(format!("control factor '{}' is not classical", c))),
            })
            .collect::<Result<_>>()?;
        let mut embedded: HashMap<Vec<usize>, CMatrix> = HashMap::new();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let ctl: Vec<usize> = positions.iter().map(|&p| b.key[p]).collect();
            if !embedded.contains_key(&ctl) {
                let u = pick(&ctl);
                if u.unitarity_defect() > tol::UNITARY {
                    return Err(Error::Validation(format!(
                        "operator for control {:?} is not unitary (defect {:.3e})",
                        ctl,
                        u.unitarity_defect()
                    )));
                }
                embedded.insert(ctl.clone(), self.active.embed(&u, on)?);
            }
            let mut s = b.state.conjugate_by(&embedded[&ctl]);
            s.hermitize();
            blocks.push(Block { key: b.key.clone(), weight: b.weight, state: s });
        }
        Ok(self.with_blocks(blocks))
    }

    /// Apply an instrument on the listed active labels, recording the
    /// outcome in the named classical register. The register must be blank
    /// (index 0 in every block) so that no information is overwritten.
    pub fn apply_instrument(
        &self,
        instrument: &QuantumInstrument,
        on: &[&str],
        register: &str,
    ) -> Result<Self> {
        let reg = match self.category(register)? {
            Category::Classical(i) => i,
            _ => {
                return Err(Error::Validation(format!(
                    "register '{}' is not a classical factor",
                    register
                )))
            }
        };
        let reg_dim = self.classical[reg].1;
        if reg_dim != instrument.outcome_count() {
            return Err(Error::dim(format!(
                "register '{}' has dimension {}, instrument has {} outcomes",
                register,
                reg_dim,
                instrument.outcome_count()
            )));
        }
        if self.blocks.iter().any(|b| b.key[reg] != 0) {
            return Err(Error::Validation(format!(
                "register '{}' has already been written",
                register
            )));
        }
        let sub = self.active.subspace(on)?;
        if sub.total_dim() != instrument.space().total_dim() {
            return Err(Error::dim(format!(
                "instrument acts on dimension {}, labels {:?} span {}",
                instrument.space().total_dim(),
                on,
                sub.total_dim()
            )));
        }
        let embedded: Vec<Vec<CMatrix>> = instrument
            .branches()
            .iter()
            .map(|br| br.kraus().iter().map(|k| self.active.embed(k, on)).collect::<Result<_>>())
            .collect::<Result<_>>()?;

        let dim = self.active.total_dim();
        let mut blocks = Vec::new();
        for b in &self.blocks {
            for (y, ops) in embedded.iter().enumerate() {
                let mut raw = CMatrix::zeros(dim, dim);
                for k in ops {
                    raw = raw.add(&k.matmul(&b.state).matmul(&k.adjoint()));
                }
                raw.hermitize();
                let p = raw.trace().re;
                let weight = b.weight * p;
                if weight <= tol::BLOCK_WEIGHT {
                    continue;
                }
                let mut key = b.key.clone();
                key[reg] = y;
                blocks.push(Block { key, weight, state: raw.scale(1.0 / p) });
            }
        }
        Ok(self.with_blocks(blocks))
    }

    /// Interact a shared bath factor with an active data factor through the
    /// sector-controlled unitary `sum_k op_k (x) |k><k|` (bath index fast).
    /// Because the bath is diagonal in the control basis, the joint state
    /// stays block-diagonal over the bath index exactly, so the bath moves
    /// from the shared list to the classical list and each block splits into
    /// one branch per bath level. The bath state's diagonality is verified,
    /// not assumed; its diagonal supplies the branch probabilities.
    pub fn classicalize_collision(
        &self,
        data: &str,
        bath: &str,
        level_ops: &[CMatrix],
    ) -> Result<Self> {
        let sp = match self.category(bath)? {
            Category::Shared(i) => i,
            _ => {
                return Err(Error::Validation(format!(
                    "collision bath '{}' must be a shared factor",
                    bath
                )))
            }
        };
        let bath_state = &self.shared[sp];
        let bath_dim = bath_state.dim();
        if level_ops.len() != bath_dim {
            return Err(Error::dim(format!(
                "{} level operators for bath dimension {}",
                level_ops.len(),
                bath_dim
            )));
        }
        let mut weights = Vec::with_capacity(bath_dim);
        for i in 0..bath_dim {
            for j in 0..bath_dim {
                if i != j && bath_state.matrix().get(i, j).norm() > tol::ZERO_CUTOFF {
                    return Err(Error::Validation(format!(
                        "bath '{}' is not diagonal in the control basis (|[{},{}]| = {:.3e})",
                        bath,
                        i,
                        j,
                        bath_state.matrix().get(i, j).norm()
                    )));
                }
            }
            weights.push(bath_state.matrix().get(i, i).re);
        }
        let embedded: Vec<CMatrix> = level_ops
            .iter()
            .map(|op| {
                if op.unitarity_defect() > tol::UNITARY {
                    return Err(Error::Validation(format!(
                        "collision level operator is not unitary (defect {:.3e})",
                        op.unitarity_defect()
                    )));
                }
                self.active.embed(op, &[data])
            })
            .collect::<Result<_>>()?;

        let bath_master = self.master_index(bath)?;
        let insert_at = self
            .classical
            .iter()
            .filter(|(l, _)| self.master_index(l).expect("classical label in master") < bath_master)
            .count();

        let mut classical = self.classical.clone();
        classical.insert(insert_at, (bath.to_string(), bath_dim));
        let mut shared = self.shared.clone();
        shared.remove(sp);

        let mut blocks = Vec::new();
        for b in &self.blocks {
            for (k, (&q, emb)) in weights.iter().zip(&embedded).enumerate() {
                let weight = b.weight * q;
                if weight <= tol::BLOCK_WEIGHT {
                    continue;
                }
                let mut key = b.key.clone();
                key.insert(insert_at, k);
                let mut s = b.state.conjugate_by(emb);
                s.hermitize();
                blocks.push(Block { key, weight, state: s });
            }
        }
        blocks.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(Self {
            master: self.master.clone(),
            classical,
            active: self.active.clone(),
            shared,
            blocks,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Exchange the contents of an active factor and a shared factor of the
    /// same dimension (the SWAP unitary, applied exactly). Afterwards the
    /// active label holds the former shared state, uncorrelated, and the
    /// shared label carries the former active content inside the blocks.
    pub fn swap_active_with_shared(&self, active_label: &str, shared_label: &str) -> Result<Self> {
        if !matches!(self.category(active_label)?, Category::Active) {
            return Err(Error::Validation(format!("'{}' is not an active factor", active_label)));
        }
        let sp = match self.category(shared_label)? {
            Category::Shared(i) => i,
            _ => {
                return Err(Error::Validation(format!(
                    "'{}' is not a shared factor",
                    shared_label
                )))
            }
        };
        let da = self.active.dim_of(active_label)?;
        let ds = self.shared[sp].dim();
        if da != ds {
            return Err(Error::dim(format!(
                "swap between '{}' (dim {}) and '{}' (dim {})",
                active_label, da, shared_label, ds
            )));
        }

        // Relabel the active slot, then permute the blocks so the active
        // factors sit in master-relative order again.
        let renamed = self.active.renamed(active_label, shared_label)?;
        let mut new_order_owned: Vec<(String, usize)> = renamed
            .labels()
            .iter()
            .map(|l| (l.to_string(), self.master_index(l).expect("label in master")))
            .collect();
        new_order_owned.sort_by_key(|e| e.1);
        let new_order: Vec<&str> = new_order_owned.iter().map(|(l, _)| l.as_str()).collect();
        let perm = renamed.permutation_to(&new_order)?;
        let dims = renamed.dims();
        let factors: Vec<(&str, usize)> =
            new_order.iter().zip(perm.iter()).map(|(l, &p)| (*l, dims[p])).collect();
        let new_active = CompositeSpace::new(&factors)?;

        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            blocks.push(Block {
                key: b.key.clone(),
                weight: b.weight,
                state: permute_subsystems(&b.state, &dims, &perm)?,
            });
        }

        let mut shared: Vec<(usize, DensityMatrix)> = self
            .shared
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != sp)
            .map(|(_, s)| (self.master_index(s.space().labels()[0]).expect("shared label"), s.clone()))
            .collect();
        shared.push((
            self.master_index(active_label)?,
            self.shared[sp].renamed(shared_label, active_label)?,
        ));
        shared.sort_by_key(|e| e.0);

        Ok(Self {
            master: self.master.clone(),
            classical: self.classical.clone(),
            active: new_active,
            shared: shared.into_iter().map(|e| e.1).collect(),
            blocks,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Trace out the listed classical factors, merging blocks that agree on
    /// the remaining indices.
    pub fn discard_classical(&self, labels: &[&str]) -> Result<Self> {
        let mut drop = Vec::new();
        for l in labels {
            match self.category(l)? {
                Category::Classical(i) => drop.push(i),
                _ => {
                    return Err(Error::Validation(format!("'{}' is not a classical factor", l)))
                }
            }
        }
        drop.sort_unstable();
        drop.dedup();
        let keep: Vec<usize> =
            (0..self.classical.len()).filter(|i| !drop.contains(i)).collect();

        let dim = self.active.total_dim();
        let mut merged: BTreeMap<Vec<usize>, (Real, CMatrix)> = BTreeMap::new();
        for b in &self.blocks {
            let key: Vec<usize> = keep.iter().map(|&i| b.key[i]).collect();
            let entry =
                merged.entry(key).or_insert_with(|| (0.0, CMatrix::zeros(dim, dim)));
            entry.0 += b.weight;
            entry.1.add_scaled_in_place(&b.state, b.weight);
        }
        let blocks = merged
            .into_iter()
            .filter(|(_, (w, _))| *w > tol::BLOCK_WEIGHT)
            .map(|(key, (w, m))| Block { key, weight: w, state: m.scale(1.0 / w) })
            .collect();

        let mut master = self.master.clone();
        master.retain(|l| !labels.contains(&l.as_str()));
        let classical = keep.iter().map(|&i| self.classical[i].clone()).collect();
        Ok(Self {
            master,
            classical,
            active: self.active.clone(),
            shared: self.shared.clone(),
            blocks,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Append (at the end of the master order) a classical factor that
    /// duplicates the index of an existing one. This models a pointer whose
    /// post-measurement states are the basis states labeled by the outcome.
    pub fn with_classical_copy(&self, new_label: &str, of: &str) -> Result<Self> {
        if self.master_index(new_label).is_ok() {
            return Err(Error::Validation(format!("label '{}' already exists", new_label)));
        }
        let src = match self.category(of)? {
            Category::Classical(i) => i,
            _ => return Err(Error::Validation(format!("'{}' is not a classical factor", of))),
        };
        let dim = self.classical[src].1;
        let mut master = self.master.clone();
        master.push(new_label.to_string());
        let mut classical = self.classical.clone();
        classical.push((new_label.to_string(), dim));
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut key = b.key.clone();
                key.push(b.key[src]);
                Block { key, weight: b.weight, state: b.state.clone() }
            })
            .collect();
        Ok(Self {
            master,
            classical,
            active: self.active.clone(),
            shared: self.shared.clone(),
            blocks,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Probability of a joint classical assignment together with the state
    /// conditioned on it (same factor layout, conditioned registers pinned).
    pub fn conditioned_on(&self, given: &[(&str, usize)]) -> Result<(Real, Self)> {
        let mut pins: Vec<(usize, usize)> = Vec::new();
        for (label, index) in given {
            let i = match self.category(label)? {
                Category::Classical(i) => i,
                _ => {
                    return Err(Error::Validation(format!(
                        "'{}' is not a classical factor",
                        label
                    )))
                }
            };
            if *index >= self.classical[i].1 {
                return Err(Error::OutOfRange {
                    context: format!("index {} of classical factor '{}'", index, label),
                });
            }
            pins.push((i, *index));
        }
        let matching: Vec<&Block> = self
            .blocks
            .iter()
            .filter(|b| pins.iter().all(|&(i, v)| b.key[i] == v))
            .collect();
        let total: Real = matching.iter().map(|b| b.weight).sum();
        if total <= tol::BLOCK_WEIGHT {
            return Err(Error::Validation(format!(
                "conditioning event {:?} has negligible probability {:.3e}",
                given, total
            )));
        }
        let blocks = matching
            .into_iter()
            .map(|b| Block { key: b.key.clone(), weight: b.weight / total, state: b.state.clone() })
            .collect();
        Ok((total, self.with_blocks(blocks)))
    }

    /// Canonicalize a label set: deduplicate and sort into master order.
    fn canonical(&self, labels: &[&str]) -> Result<Vec<String>> {
        let mut indexed: Vec<(usize, &str)> =
            labels.iter().map(|l| Ok((self.master_index(l)?, *l))).collect::<Result<_>>()?;
        indexed.sort_unstable();
        indexed.dedup();
        Ok(indexed.into_iter().map(|(_, l)| l.to_string()).collect())
    }

    /// Group blocks by their indices on the listed classical factors
    /// (marginalizing the others) and reduce them to the listed active
    /// labels. Returns `(group key, group weight, normalized state)`;
    /// the state is absent when no active labels were requested.
    fn grouped(
        &self,
        c_in: &[usize],
        q_in: &[&str],
    ) -> Result<Vec<(Vec<usize>, Real, Option<CMatrix>)>> {
        let keep = self.active.positions_sorted(q_in)?;
        let dims = self.active.dims();
        let reduce_all = keep.len() == dims.len();
        let mut groups: BTreeMap<Vec<usize>, (Real, Option<CMatrix>)> = BTreeMap::new();
        for b in &self.blocks {
            let gkey: Vec<usize> = c_in.iter().map(|&p| b.key[p]).collect();
            let entry = groups.entry(gkey).or_insert((0.0, None));
            entry.0 += b.weight;
            if !q_in.is_empty() {
                let reduced = if reduce_all {
                    b.state.clone()
                } else {
                    partial_trace(&b.state, &dims, &keep)?
                };
                match &mut entry.1 {
                    Some(acc) => acc.add_scaled_in_place(&reduced, b.weight),
                    None => entry.1 = Some(reduced.scale(b.weight)),
                }
            }
        }
        Ok(groups
            .into_iter()
            .filter(|(_, (w, _))| *w > tol::BLOCK_WEIGHT)
            .map(|(key, (w, m))| {
                let state = m.map(|m| {
                    let mut s = m.scale(1.0 / w);
                    s.hermitize();
                    s
                });
                (key, w, state)
            })
            .collect())
    }

    /// Von Neumann entropy of the reduced state on the listed labels, in
    /// nats. Decomposes into a Shannon term over the classical indices in
    /// the set, weighted block entropies, and shared-factor entropies.
    pub fn entropy_of(&self, labels: &[&str]) -> Result<Real> {
        let canon = self.canonical(labels)?;
        if let Some(v) = self.cache.borrow().get(&canon) {
            return Ok(*v);
        }
        let mut c_in = Vec::new();
        let mut q_in = Vec::new();
        let mut total = 0.0;
        for l in &canon {
            match self.category(l)? {
                Category::Classical(i) => c_in.push(i),
                Category::Active => q_in.push(l.as_str()),
                Category::Shared(i) => total += von_neumann(&self.shared[i])?,
            }
        }
        if !c_in.is_empty() || !q_in.is_empty() {
            let groups = self.grouped(&c_in, &q_in)?;
            let weights: Vec<Real> = groups.iter().map(|(_, w, _)| *w).collect();
            total += shannon(&weights)?;
            for (_, w, state) in &groups {
                if let Some(s) = state {
                    total += w * von_neumann_dense(s)?;
                }
            }
        }
        self.cache.borrow_mut().insert(canon, total);
        Ok(total)
    }

    /// `H(target | given)`, the label sets being disjoint.
    pub fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<Real> {
        ensure_disjoint(&[target, given])?;
        let joint = self.entropy_of(&union(&[target, given]))?;
        Ok(joint - self.entropy_of(given)?)
    }

    /// `I(a : b)`, the label sets being disjoint.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<Real> {
        ensure_disjoint(&[a, b])?;
        Ok(self.entropy_of(a)? + self.entropy_of(b)? - self.entropy_of(&union(&[a, b]))?)
    }

    /// `I(a : b | c)`, the label sets being pairwise disjoint.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
    ) -> Result<Real> {
        ensure_disjoint(&[a, b, c])?;
        Ok(self.entropy_of(&union(&[a, c]))? + self.entropy_of(&union(&[b, c]))?
            - self.entropy_of(&union(&[a, b, c]))?
            - self.entropy_of(c)?)
    }

    /// Joint distribution of the listed classical factors, as
    /// `(index assignment, probability)` in lexicographic key order.
    pub fn weights_of(&self, labels: &[&str]) -> Result<Vec<(Vec<usize>, Real)>> {
        let canon = self.canonical(labels)?;
        let mut c_in = Vec::new();
        for l in &canon {
            match self.category(l)? {
                Category::Classical(i) => c_in.push(i),
                _ => {
                    return Err(Error::Validation(format!("'{}' is not a classical factor", l)))
                }
            }
        }
        Ok(self.grouped(&c_in, &[])?.into_iter().map(|(k, w, _)| (k, w)).collect())
    }

    /// Dense reduced density matrix on the listed labels (master order).
    /// Classical factors enter as diagonal projectors in their fixed basis.
    /// Intended for small subsets; the result dimension is the product of
    /// the listed factor dimensions.
    pub fn reduced_dense(&self, labels: &[&str]) -> Result<DensityMatrix> {
        let canon = self.canonical(labels)?;
        if canon.is_empty() {
            return Err(Error::Validation("reduced_dense needs at least one label".into()));
        }
        let mut c_labels: Vec<&str> = Vec::new();
        let mut c_pos = Vec::new();
        let mut q_labels: Vec<&str> = Vec::new();
        let mut s_mats: Vec<&CMatrix> = Vec::new();
        let mut s_labels: Vec<&str> = Vec::new();
        for l in &canon {
            match self.category(l)? {
                Category::Classical(i) => {
                    c_labels.push(l.as_str());
                    c_pos.push(i);
                }
                Category::Active => q_labels.push(l.as_str()),
                Category::Shared(i) => {
                    s_labels.push(l.as_str());
                    s_mats.push(self.shared[i].matrix());
                }
            }
        }
        let c_dims: Vec<usize> = c_pos.iter().map(|&i| self.classical[i].1).collect();
        let c_total: usize = c_dims.iter().product();
        let shared_tail = if s_mats.is_empty() { None } else { Some(kron_chain(&s_mats)) };

        // Assemble on the temporary order [classical..., active..., shared...]
        // and permute into the canonical (master) order afterwards.
        let mut temp_labels: Vec<&str> = c_labels.clone();
        temp_labels.extend(&q_labels);
        temp_labels.extend(&s_labels);
        let mut temp_dims = c_dims.clone();
        for l in &q_labels {
            temp_dims.push(self.active.dim_of(l)?);
        }
        for m in &s_mats {
            temp_dims.push(m.rows());
        }
        let total: usize = temp_dims.iter().product();

        let mut acc = CMatrix::zeros(total, total);
        for (key, w, state) in self.grouped(&c_pos, &q_labels)? {
            let mut part: Option<CMatrix> = if !c_labels.is_empty() {
                let mut idx = 0;
                for (&k, &d) in key.iter().zip(&c_dims) {
                    idx = idx * d + k;
                }
                let mut proj = CMatrix::zeros(c_total, c_total);
                proj.set(idx, idx, 1.0.into());
                Some(proj)
            } else {
                None
            };
            if let Some(s) = &state {
                part = Some(match part {
                    Some(p) => kron(&p, s),
                    None => s.clone(),
                });
            }
            if let Some(tail) = &shared_tail {
                part = Some(match part {
                    Some(p) => kron(&p, tail),
                    None => tail.clone(),
                });
            }
            acc.add_scaled_in_place(&part.expect("canon is nonempty"), w);
        }

        let canon_refs: Vec<&str> = canon.iter().map(|s| s.as_str()).collect();
        let perm: Vec<usize> = canon_refs
            .iter()
            .map(|l| temp_labels.iter().position(|t| t == l).expect("label in temp order"))
            .collect();
        let mut m = permute_subsystems(&acc, &temp_dims, &perm)?;
        m.hermitize();
        let factors: Vec<(&str, usize)> = canon_refs
            .iter()
            .zip(perm.iter().map(|&p| temp_dims[p]))
            .map(|(l, d)| (*l, d))
            .collect();
        DensityMatrix::new(CompositeSpace::new(&factors)?, m)
    }

    /// Dense state on every factor. Exponential in the factor count; meant
    /// for cross-checks on small examples.
    pub fn to_dense(&self) -> Result<DensityMatrix> {
        let labels: Vec<&str> = self.master.iter().map(|s| s.as_str()).collect();
        self.reduced_dense(&labels)
    }

    /// Expectation of a Hermitian operator on the listed labels.
    pub fn expectation_of(&self, op: &CMatrix, on: &[&str]) -> Result<Real> {
        self.reduced_dense(on)?.expectation(op, on)
    }
}

fn union<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    let mut all: Vec<&str> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    all
}

fn ensure_disjoint(sets: &[&[&str]]) -> Result<()> {
    let mut all: Vec<&str> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    let n = all.len();
    all.sort_unstable();
    all.dedup();
    if all.len() != n {
        return Err(Error::Validation("label sets must be disjoint".into()));
    }
    Ok(())
}

fn kron_chain(mats: &[&CMatrix]) -> CMatrix {
    let mut acc = mats[0].clone();
    for m in &mats[1..] {
        acc = kron(&acc, m);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{basis_projector, pauli_x, shift_unitary};
    use crate::entropy::von_neumann;
    use crate::random::{random_density, seeded_rng};
    use crate::C64;

    fn dm(factors: &[(&str, usize)], m: CMatrix) -> DensityMatrix {
        DensityMatrix::new(CompositeSpace::new(factors).unwrap(), m).unwrap()
    }

    /// Interleaved three-category fixture together with its dense mirror,
    /// built through the independent `state` module tensor arithmetic.
    fn rich() -> (QcState, DensityMatrix) {
        let mut rng = seeded_rng(41);
        let active = dm(&[("a", 2), ("b", 3)], random_density(6, &mut rng));
        let shared = dm(&[("s", 2)], random_density(2, &mut rng));
        let x0 =
            DensityMatrix::basis_state(CompositeSpace::single("x", 2), 0).unwrap();
        let dense = active
            .tensor(&x0)
            .unwrap()
            .tensor(&shared)
            .unwrap()
            .permute(&["a", "x", "s", "b"])
            .unwrap();
        let qc = QcState::new(&["a", "x", "s", "b"], &[("x", 2, 0)], active, vec![shared])
            .unwrap();
        (qc, dense)
    }

    fn z_instrument_on_a() -> QuantumInstrument {
        QuantumInstrument::projective(
            CompositeSpace::single("a", 2),
            vec![basis_projector(2, 0), basis_projector(2, 1)],
        )
        .unwrap()
    }

    /// Dense mirror of recording a projective measurement of `a` into the
    /// blank register `x`, assembled by hand from the branch states.
    fn dense_after_z(dense: &DensityMatrix) -> DensityMatrix {
        let rest = dense.reduce(&["a", "s", "b"]).unwrap();
        let master = CompositeSpace::new(&[("a", 2), ("x", 2), ("s", 2), ("b", 3)]).unwrap();
        let mut acc = CMatrix::zeros(master.total_dim(), master.total_dim());
        for y in 0..2 {
            let e = rest.space().embed(&basis_projector(2, y), &["a"]).unwrap();
            let mut raw = e.matmul(rest.matrix()).matmul(&e.adjoint());
            raw.hermitize();
            let p = raw.trace().re;
            if p <= tol::BLOCK_WEIGHT {
                continue;
            }
            let branch = DensityMatrix::new(rest.space().clone(), raw.scale(1.0 / p)).unwrap();
            let tagged = DensityMatrix::basis_state(CompositeSpace::single("x", 2), y)
                .unwrap()
                .tensor(&branch)
                .unwrap()
                .permute(&["a", "x", "s", "b"])
                .unwrap();
            acc.add_scaled_in_place(tagged.matrix(), p);
        }
        DensityMatrix::new(master, acc).unwrap()
    }

    #[test]
    fn product_state_matches_dense() {
        let (qc, dense) = rich();
        qc.validate().unwrap();
        assert!(qc.to_dense().unwrap().matrix().max_diff(dense.matrix()) < 1e-13);
        for set in [
            vec!["a"],
            vec!["b"],
            vec!["x"],
            vec!["s"],
            vec!["a", "b"],
            vec!["x", "a"],
            vec!["b", "s"],
            vec!["a", "x", "s", "b"],
        ] {
            let blockwise = qc.entropy_of(&set).unwrap();
            let direct = von_neumann(&dense.reduce(&set).unwrap()).unwrap();
            assert!(
                (blockwise - direct).abs() < 1e-11,
                "entropy mismatch on {:?}: {} vs {}",
                set,
                blockwise,
                direct
            );
        }
        let r = qc.reduced_dense(&["x", "b"]).unwrap();
        let d = dense.reduce(&["x", "b"]).unwrap();
        assert_eq!(r.space().labels(), d.space().labels());
        assert!(r.matrix().max_diff(d.matrix()) < 1e-12);
    }

    #[test]
    fn instrument_recording_matches_dense() {
        let (qc, dense) = rich();
        let inst = z_instrument_on_a();
        let qc2 = qc.apply_instrument(&inst, &["a"], "x").unwrap();
        qc2.validate().unwrap();
        let mirror = dense_after_z(&dense);
        assert!(qc2.to_dense().unwrap().matrix().max_diff(mirror.matrix()) < 1e-12);

        let weights = qc2.weights_of(&["x"]).unwrap();
        let marginal = mirror.reduce(&["x"]).unwrap();
        for (key, w) in &weights {
            let p = marginal.matrix().get(key[0], key[0]).re;
            assert!((w - p).abs() < 1e-12);
        }
        for set in [vec!["x"], vec!["x", "a"], vec!["a", "b", "s"]] {
            let blockwise = qc2.entropy_of(&set).unwrap();
            let direct = von_neumann(&mirror.reduce(&set).unwrap()).unwrap();
            assert!((blockwise - direct).abs() < 1e-10, "mismatch on {:?}", set);
        }

        // The register now carries information and must refuse a rewrite.
        assert!(matches!(
            qc2.apply_instrument(&inst, &["a"], "x"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn controlled_unitary_matches_dense() {
        let (qc, dense) = rich();
        let inst = z_instrument_on_a();
        let qc2 = qc.apply_instrument(&inst, &["a"], "x").unwrap();
        let mirror = dense_after_z(&dense);

        let qc3 = qc2
            .apply_controlled_unitary(&["x"], &["b"], |ctl| {
                if ctl[0] == 1 {
                    shift_unitary(3, 1)
                } else {
                    CMatrix::identity(3)
                }
            })
            .unwrap();
        // Same evolution as one block-diagonal unitary on (x, b).
        let mut u = CMatrix::zeros(6, 6);
        for (y, shift) in [(0usize, 0usize), (1, 1)] {
            let s = shift_unitary(3, shift);
            for i in 0..3 {
                for j in 0..3 {
                    u.set(y * 3 + i, y * 3 + j, s.get(i, j));
                }
            }
        }
        let mirror3 = mirror.apply_unitary(&u, &["x", "b"]).unwrap();
        assert!(qc3.to_dense().unwrap().matrix().max_diff(mirror3.matrix()) < 1e-12);
    }

    #[test]
    fn collision_matches_dense_dilation() {
        let mut rng = seeded_rng(7);
        let data = dm(&[("d", 2)], random_density(2, &mut rng));
        let bath = dm(&[("e", 2)], CMatrix::from_diagonal(&[0.8, 0.2]));
        let qc = QcState::new(&["d", "e"], &[], data.clone(), vec![bath.clone()]).unwrap();
        let ops = [CMatrix::identity(2), pauli_x()];
        let qc2 = qc.classicalize_collision("d", "e", &ops).unwrap();
        qc2.validate().unwrap();
        assert_eq!(qc2.classical_labels(), vec!["e"]);
        assert!(qc2.shared_labels().is_empty());

        let u = kron(&CMatrix::identity(2), &basis_projector(2, 0))
            .add(&kron(&pauli_x(), &basis_projector(2, 1)));
        let mirror = data.tensor(&bath).unwrap().apply_unitary(&u, &["d", "e"]).unwrap();
        assert!(qc2.to_dense().unwrap().matrix().max_diff(mirror.matrix()) < 1e-12);

        let weights = qc2.weights_of(&["e"]).unwrap();
        assert!((weights[0].1 - 0.8).abs() < 1e-12);
        assert!((weights[1].1 - 0.2).abs() < 1e-12);

        let hd = qc2.entropy_of(&["d"]).unwrap();
        let dd = von_neumann(&mirror.reduce(&["d"]).unwrap()).unwrap();
        assert!((hd - dd).abs() < 1e-11);
    }

    #[test]
    fn collision_rejects_structural_misuse() {
        let mut rng = seeded_rng(9);
        let data = dm(&[("d", 2)], random_density(2, &mut rng));
        let mut coherent = CMatrix::from_diagonal(&[0.8, 0.2]);
        coherent.set(0, 1, C64::new(0.1, 0.0));
        coherent.set(1, 0, C64::new(0.1, 0.0));
        let bath = dm(&[("e", 2)], coherent);
        let qc = QcState::new(&["d", "e"], &[], data.clone(), vec![bath]).unwrap();
        let ops = [CMatrix::identity(2), pauli_x()];
        assert!(matches!(
            qc.classicalize_collision("d", "e", &ops),
            Err(Error::Validation(_))
        ));

        let diag = dm(&[("e", 2)], CMatrix::from_diagonal(&[0.8, 0.2]));
        let qc = QcState::new(&["d", "e"], &[], data, vec![diag]).unwrap();
        assert!(qc.classicalize_collision("d", "e", &ops[..1]).is_err());
        let not_unitary = [CMatrix::identity(2).scale(0.5), pauli_x()];
        assert!(qc.classicalize_collision("d", "e", &not_unitary).is_err());
    }

    #[test]
    fn swap_exchanges_active_and_shared_contents() {
        let mut rng = seeded_rng(23);
        let active = dm(&[("a", 2), ("b", 2)], random_density(4, &mut rng));
        let shared = dm(&[("c", 2)], random_density(2, &mut rng));
        let qc = QcState::new(&["a", "b", "c"], &[], active.clone(), vec![shared.clone()])
            .unwrap();
        let qc2 = qc.swap_active_with_shared("b", "c").unwrap();
        qc2.validate().unwrap();
        assert_eq!(qc2.shared_labels(), vec!["b"]);
        assert_eq!(qc2.active_space().labels(), vec!["a", "c"]);

        // Contents moved: b now holds the former shared state, (a, c) the
        // former (a, b) correlations.
        let b_after = qc2.reduced_dense(&["b"]).unwrap();
        assert!(b_after.matrix().max_diff(shared.matrix()) < 1e-13);
        let ac = qc2.reduced_dense(&["a", "c"]).unwrap();
        assert!(ac.matrix().max_diff(active.matrix()) < 1e-13);

        // Identical to conjugating the dense state by the SWAP unitary.
        let mut swap = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap.set(i * 2 + j, j * 2 + i, C64::new(1.0, 0.0));
            }
        }
        let mirror = active
            .tensor(&shared)
            .unwrap()
            .apply_unitary(&swap, &["b", "c"])
            .unwrap();
        assert!(qc2.to_dense().unwrap().matrix().max_diff(mirror.matrix()) < 1e-12);
    }

    #[test]
    fn discard_and_classical_copy() {
        let (qc, dense) = rich();
        let inst = z_instrument_on_a();
        let qc2 = qc.apply_instrument(&inst, &["a"], "x").unwrap();
        let mirror = dense_after_z(&dense);

        let qc3 = qc2.discard_classical(&["x"]).unwrap();
        qc3.validate().unwrap();
        assert_eq!(qc3.master_labels(), vec!["a", "s", "b"]);
        let reduced = mirror.reduce(&["a", "s", "b"]).unwrap();
        assert!(qc3.to_dense().unwrap().matrix().max_diff(reduced.matrix()) < 1e-12);

        let qc4 = qc2.with_classical_copy("m", "x").unwrap();
        qc4.validate().unwrap();
        let hx = qc4.entropy_of(&["x"]).unwrap();
        assert!((qc4.entropy_of(&["m", "x"]).unwrap() - hx).abs() < 1e-12);
        assert!((qc4.mutual_information(&["m"], &["x"]).unwrap() - hx).abs() < 1e-12);
        assert!(
            qc4.conditional_mutual_information(&["a", "b"], &["m"], &["x"]).unwrap().abs()
                < 1e-12
        );
    }

    #[test]
    fn conditioning_recovers_posterior_branches() {
        let (qc, dense) = rich();
        let inst = z_instrument_on_a();
        let qc2 = qc.apply_instrument(&inst, &["a"], "x").unwrap();
        let mirror = dense_after_z(&dense);

        let weights = qc2.weights_of(&["x"]).unwrap();
        let (p0, cond) = qc2.conditioned_on(&[("x", 0)]).unwrap();
        assert!((p0 - weights[0].1).abs() < 1e-14);
        assert!((cond.total_weight() - 1.0).abs() < 1e-12);

        // Posterior on (a, b, s) equals the dense branch, renormalized.
        let e = mirror.space().embed(&basis_projector(2, 0), &["x"]).unwrap();
        let mut raw = e.matmul(mirror.matrix()).matmul(&e.adjoint());
        raw.hermitize();
        let p = raw.trace().re;
        let branch = DensityMatrix::new(mirror.space().clone(), raw.scale(1.0 / p))
            .unwrap()
            .reduce(&["a", "s", "b"])
            .unwrap();
        let got = cond.reduced_dense(&["a", "s", "b"]).unwrap();
        assert!(got.matrix().max_diff(branch.matrix()) < 1e-12);

        assert!(matches!(
            qc2.conditioned_on(&[("x", 5)]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn zero_weight_branches_are_dropped() {
        let ground = DensityMatrix::basis_state(CompositeSpace::single("a", 2), 0).unwrap();
        let qc = QcState::new(&["a", "x"], &[("x", 2, 0)], ground, vec![]).unwrap();
        let qc2 = qc.apply_instrument(&z_instrument_on_a(), &["a"], "x").unwrap();
        assert_eq!(qc2.block_count(), 1);
        assert!((qc2.total_weight() - 1.0).abs() < 1e-14);
        qc2.validate().unwrap();
        assert!(qc2.conditioned_on(&[("x", 1)]).is_err());
    }

    #[test]
    fn entropy_decomposition_matches_dense_on_all_subsets() {
        let mut rng = seeded_rng(17);
        let active = dm(&[("q0", 2), ("q1", 2)], random_density(4, &mut rng));
        let shared = dm(&[("t", 2)], random_density(2, &mut rng));
        let qc = QcState::new(&["q0", "r", "q1", "t"], &[("r", 3, 0)], active, vec![shared])
            .unwrap();
        // Three-outcome coarse measurement of the joint (q0, q1) parity.
        let projectors = vec![
            basis_projector(4, 0),
            basis_projector(4, 1).add(&basis_projector(4, 2)),
            basis_projector(4, 3),
        ];
        let inst = QuantumInstrument::projective(
            CompositeSpace::new(&[("q0", 2), ("q1", 2)]).unwrap(),
            projectors,
        )
        .unwrap();
        let qc2 = qc.apply_instrument(&inst, &["q0", "q1"], "r").unwrap();
        qc2.validate().unwrap();

        let dense = qc2.to_dense().unwrap();
        let labels = ["q0", "r", "q1", "t"];
        for mask in 1..16u32 {
            let set: Vec<&str> = labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, l)| *l)
                .collect();
            let blockwise = qc2.entropy_of(&set).unwrap();
            let direct = von_neumann(&dense.reduce(&set).unwrap()).unwrap();
            assert!(
                (blockwise - direct).abs() < 1e-10,
                "subset {:?}: blockwise {} vs dense {}",
                set,
                blockwise,
                direct
            );
        }
    }

    #[test]
    fn constructor_and_query_misuse_is_rejected() {
        let mut rng = seeded_rng(3);
        let active = dm(&[("a", 2), ("b", 3)], random_density(6, &mut rng));
        let shared = dm(&[("s", 2)], random_density(2, &mut rng));

        // Label categories must exactly tile the master list.
        assert!(QcState::new(&["a", "b"], &[], active.clone(), vec![shared.clone()]).is_err());
        assert!(QcState::new(
            &["a", "x", "s", "b"],
            &[("x", 2, 2)],
            active.clone(),
            vec![shared.clone()]
        )
        .is_err());
        // Active factors listed against the master order.
        let flipped = active.permute(&["b", "a"]).unwrap();
        assert!(QcState::new(&["a", "x", "s", "b"], &[("x", 2, 0)], flipped, vec![shared.clone()])
            .is_err());

        let qc = QcState::new(&["a", "x", "s", "b"], &[("x", 2, 0)], active, vec![shared])
            .unwrap();
        assert!(matches!(
            qc.apply_instrument(&z_instrument_on_a(), &["a"], "b"),
            Err(Error::Validation(_))
        ));
        assert!(qc
            .apply_controlled_unitary(&["a"], &["b"], |_| CMatrix::identity(3))
            .is_err());
        assert!(matches!(
            qc.swap_active_with_shared("b", "s"),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(qc.discard_classical(&["a"]).is_err());
        assert!(matches!(
            qc.entropy_of(&["nope"]),
            Err(Error::UnknownLabel { .. })
        ));
        assert!(qc.conditional_entropy(&["a"], &["a", "x"]).is_err());
        assert!(qc.expectation_of(&pauli_x(), &["a"]).is_ok());
    }
}
