//! Three-qubit repetition codes and the dephasing-to-flip parameter map.
//!
//! A [`CodeSpec`] packages everything the correction cycle needs: the
//! encoding unitary for each ancilla-preparation outcome `x`, the syndrome
//! projectors, and the decoding unitary for each record pair `(x, y)`.
//! Decoders finish the job: they apply the corrective Pauli selected by the
//! syndrome and then run the encoding CNOT pair in reverse, so the logical
//! content returns to the data qubit and both ancillas land in `|00>` no
//! matter which `x` was recorded. Leaving the ancillas in an x-independent
//! state is what keeps the preparation record uncorrelated with the engine
//! after the reset swap.

use crate::channel::{pauli_x, require_projective, QuantumInstrument};
use crate::error::{Error, Result};
use crate::linalg::kron_all;
use crate::space::CompositeSpace;
use crate::{tol, CMatrix, Real, C64};

/// Hadamard gate on one qubit.
pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_real(2, 2, &[s, s, s, -s]).expect("static shape")
}

/// Pauli Z on one qubit.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static shape")
}

/// CNOT on a register of `qubits` qubits, with qubit 0 the leftmost tensor
/// factor: flips `target` wherever `control` is set.
pub fn cnot(qubits: usize, control: usize, target: usize) -> CMatrix {
    assert!(control < qubits && target < qubits && control != target);
    let dim = 1usize << qubits;
    let cbit = qubits - 1 - control;
    let tbit = qubits - 1 - target;
    CMatrix::from_fn(dim, dim, |i, j| {
        let image = if (j >> cbit) & 1 == 1 { j ^ (1 << tbit) } else { j };
        if i == image {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Single-qubit `op` on qubit `k` of a `qubits`-qubit register.
fn one_qubit_on(qubits: usize, k: usize, op: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(2);
    let factors: Vec<&CMatrix> = (0..qubits).map(|i| if i == k { op } else { &id }).collect();
    kron_all(&factors)
}

fn sector_projector(dim: usize, members: &[usize]) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for &m in members {
        p.set(m, m, C64::new(1.0, 0.0));
    }
    p
}

/// A complete correction-cycle recipe for one data qubit plus ancillas.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    name: String,
    ancillas: usize,
    encoders: Vec<CMatrix>,
    projectors: Vec<CMatrix>,
    decoders: Vec<Vec<CMatrix>>,
}

impl CodeSpec {
    /// Validates and assembles a spec. `encoders[x]` and `decoders[x][y]`
    /// act on the data qubit followed by the ancillas in order; `projectors`
    /// must be a complete orthogonal family on the same block.
    pub fn new(
        name: impl Into<String>,
        ancillas: usize,
        encoders: Vec<CMatrix>,
        projectors: Vec<CMatrix>,
        decoders: Vec<Vec<CMatrix>>,
    ) -> Result<Self> {
        if ancillas == 0 {
            return Err(Error::dim("a code needs at least one ancilla qubit"));
        }
        let dim = 1usize << (ancillas + 1);
        let x_count = 1usize << ancillas;
        if encoders.len() != x_count {
            return Err(Error::dim(format!(
                "expected {} encoders (one per preparation outcome), got {}",
                x_count,
                encoders.len()
            )));
        }
        require_projective(&projectors, dim)?;
        if decoders.len() != x_count {
            return Err(Error::dim(format!(
                "expected {} decoder rows, got {}",
                x_count,
                decoders.len()
            )));
        }
        for (x, u) in encoders.iter().enumerate() {
            require_unitary_block(u, dim, &format!("encoder for outcome {}", x))?;
        }
        for (x, row) in decoders.iter().enumerate() {
            if row.len() != projectors.len() {
                return Err(Error::dim(format!(
                    "decoder row {} has {} entries, expected one per syndrome ({})",
                    x,
                    row.len(),
                    projectors.len()
                )));
            }
            for (y, u) in row.iter().enumerate() {
                require_unitary_block(u, dim, &format!("decoder for records ({}, {})", x, y))?;
            }
        }
        Ok(Self { name: name.into(), ancillas, encoders, projectors, decoders })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of ancilla qubits.
    pub fn ancilla_count(&self) -> usize {
        self.ancillas
    }

    /// Dimension of the data-plus-ancilla block every unitary acts on.
    pub fn block_dim(&self) -> usize {
        1 << (self.ancillas + 1)
    }

    /// Number of ancilla-preparation outcomes (values of `x`).
    pub fn preparation_outcomes(&self) -> usize {
        self.encoders.len()
    }

    /// Number of syndrome outcomes (values of `y`).
    pub fn syndrome_outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn encoder(&self, x: usize) -> &CMatrix {
        &self.encoders[x]
    }

    pub fn syndrome_projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn decoder(&self, x: usize, y: usize) -> &CMatrix {
        &self.decoders[x][y]
    }

    /// The syndrome measurement as a projective instrument on `space`.
    pub fn syndrome_instrument(&self, space: &CompositeSpace) -> Result<QuantumInstrument> {
        if space.total_dim() != self.block_dim() {
            return Err(Error::dim(format!(
                "syndrome space has dimension {}, code blocks have {}",
                space.total_dim(),
                self.block_dim()
            )));
        }
        QuantumInstrument::projective(space.clone(), self.projectors.clone())
    }
}

fn require_unitary_block(u: &CMatrix, dim: usize, what: &str) -> Result<()> {
    if u.rows() != dim || u.cols() != dim {
        return Err(Error::dim(format!(
            "{} is {}x{}, expected dimension {}",
            what,
            u.rows(),
            u.cols(),
            dim
        )));
    }
    let defect = u.unitarity_defect();
    if defect > tol::UNITARY {
        return Err(Error::Validation(format!("{} is not unitary (defect {:.3e})", what, defect)));
    }
    Ok(())
}

/// The three-qubit code that corrects a single bit flip.
///
/// Encoding first rotates the measured ancilla pair back to `|00>` with the
/// outcome-conditioned Paulis `{I (x) I, I (x) X, X (x) I, X (x) X}`, then
/// copies the data qubit onto both ancillas with two CNOTs, reaching
/// `a|000> + b|111>` from every outcome. The four syndrome sectors are the
/// unflipped pair `{|000>, |111>}` and its single-flip images; decoder `y`
/// undoes flip `y` and then the CNOT pair.
pub fn bitflip_code() -> CodeSpec {
    let entangle = cnot(3, 0, 2).matmul(&cnot(3, 0, 1));
    let id2 = CMatrix::identity(2);
    let x = pauli_x();
    let mut encoders = Vec::with_capacity(4);
    for outcome in 0..4usize {
        let a1 = if outcome & 0b10 != 0 { &x } else { &id2 };
        let a2 = if outcome & 0b01 != 0 { &x } else { &id2 };
        let reset = kron_all(&[&id2, a1, a2]);
        encoders.push(entangle.matmul(&reset));
    }
    let projectors = vec![
        sector_projector(8, &[0b000, 0b111]),
        sector_projector(8, &[0b100, 0b011]),
        sector_projector(8, &[0b010, 0b101]),
        sector_projector(8, &[0b001, 0b110]),
    ];
    let corrections =
        [CMatrix::identity(8), one_qubit_on(3, 0, &x), one_qubit_on(3, 1, &x), one_qubit_on(3, 2, &x)];
    let row: Vec<CMatrix> = corrections.iter().map(|c| entangle.matmul(c)).collect();
    let decoders = vec![row.clone(), row.clone(), row.clone(), row];
    CodeSpec::new("bit-flip", 2, encoders, projectors, decoders).expect("static construction")
}

/// The three-qubit code that corrects a single phase flip: the bit-flip
/// construction conjugated into the `|+>/|->` basis by a Hadamard on each
/// qubit, encoding to `a|+++> + b|--->`.
pub fn phaseflip_code() -> CodeSpec {
    let bf = bitflip_code();
    let h = hadamard();
    let h3 = kron_all(&[&h, &h, &h]);
    let encoders: Vec<CMatrix> = bf.encoders.iter().map(|e| h3.matmul(e)).collect();
    let projectors: Vec<CMatrix> = bf
        .projectors
        .iter()
        .map(|p| {
            let mut q = h3.matmul(p).matmul(&h3);
            q.hermitize();
            q
        })
        .collect();
    let decoders: Vec<Vec<CMatrix>> = bf
        .decoders
        .iter()
        .map(|row| row.iter().map(|d| d.matmul(&h3)).collect())
        .collect();
    CodeSpec::new("phase-flip", 2, encoders, projectors, decoders).expect("static construction")
}

/// The phase-flip probability whose channel equals the phase-damping channel
/// with parameter `lambda`.
///
/// The damping Kraus pair `{diag(1, sqrt(1-lambda)), diag(0, sqrt(lambda))}`
/// scales the coherences by `sqrt(1-lambda)`, and the flip channel
/// `(1-q)(.) + q Z(.)Z` scales them by `1-2q`; the channels are equal (same
/// Choi matrix) exactly at `q = (1 - sqrt(1-lambda))/2`.
pub fn phase_damping_flip_prob(lambda: Real) -> Result<Real> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            context: format!("damping parameter {} outside [0, 1]", lambda),
        });
    }
    Ok((1.0 - (1.0 - lambda).sqrt()) / 2.0)
}
