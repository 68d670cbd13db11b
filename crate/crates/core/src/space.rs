//! Labeled tensor-factor bookkeeping.
//!
//! A `CompositeSpace` is an ordered list of named factors with their
//! dimensions. Every operator and state in the physics layers carries one,
//! so subsystem arithmetic happens by label rather than by hand-tracked
//! index offsets. Label order is significant: it fixes the row-major
//! index convention of every matrix attached to the space.

use crate::error::{Error, Result};
use crate::linalg::{kron, permute_subsystems};
use crate::CMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeSpace {
    factors: Vec<(String, usize)>,
}

impl CompositeSpace {
    pub fn new(factors: &[(&str, usize)]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (label, dim) in factors {
            if *dim == 0 {
                return Err(Error::dim(format!("factor '{}' has dimension zero", label)));
            }
            if !seen.insert(label.to_string()) {
                return Err(Error::UnknownLabel { label: format!("duplicate factor '{}'", label) });
            }
        }
        Ok(Self { factors: factors.iter().map(|(l, d)| (l.to_string(), *d)).collect() })
    }

    /// Single-factor space.
    pub fn single(label: &str, dim: usize) -> Self {
        Self { factors: vec![(label.to_string(), dim)] }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|(l, _)| l == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel { label: label.to_string() })
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.index_of(label)?].1)
    }

    /// Factor positions of the given labels, in the order given.
    pub fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l)).collect()
    }

    /// Positions of the given labels sorted into this space's order.
    pub fn positions_sorted(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut p = self.positions_of(labels)?;
        p.sort_unstable();
        Ok(p)
    }

    /// Subspace containing only the listed labels, kept in this space's
    /// factor order regardless of the order they are listed in.
    pub fn subspace(&self, labels: &[&str]) -> Result<CompositeSpace> {
        let positions = self.positions_sorted(labels)?;
        Ok(Self { factors: positions.into_iter().map(|i| self.factors[i].clone()).collect() })
    }

    /// Concatenated space; labels must stay unique.
    pub fn tensor(&self, other: &CompositeSpace) -> Result<CompositeSpace> {
        for (l, _) in &other.factors {
            if self.contains(l) {
                return Err(Error::UnknownLabel { label: format!("duplicate factor '{}'", l) });
            }
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(Self { factors })
    }

    /// Space with the listed labels removed.
    pub fn without(&self, labels: &[&str]) -> Result<CompositeSpace> {
        for l in labels {
            self.index_of(l)?;
        }
        Ok(Self {
            factors: self
                .factors
                .iter()
                .filter(|(l, _)| !labels.contains(&l.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Rename one factor in place (dimension unchanged).
    pub fn renamed(&self, from: &str, to: &str) -> Result<CompositeSpace> {
        let idx = self.index_of(from)?;
        if self.contains(to) {
            return Err(Error::UnknownLabel { label: format!("duplicate factor '{}'", to) });
        }
        let mut factors = self.factors.clone();
        factors[idx].0 = to.to_string();
        Ok(Self { factors })
    }

    /// Permutation `perm` such that reordering this space's factors with
    /// `perm` (new slot `s` takes old factor `perm[s]`) yields `new_order`.
    pub fn permutation_to(&self, new_order: &[&str]) -> Result<Vec<usize>> {
        if new_order.len() != self.len() {
            return Err(Error::InvalidPermutation {
                context: format!(
                    "target order lists {} labels, space has {}",
                    new_order.len(),
                    self.len()
                ),
            });
        }
        self.positions_of(new_order)
    }

    /// Lift an operator acting on the listed labels (in the listed order)
    /// to the full space, identity elsewhere, factors in this space's order.
    pub fn embed(&self, op: &CMatrix, on: &[&str]) -> Result<CMatrix> {
        let on_positions = self.positions_of(on)?;
        {
            let mut sorted = on_positions.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != on_positions.len() {
                return Err(Error::InvalidPermutation {
                    context: format!("embed target labels {:?} repeat a factor", on),
                });
            }
        }
        let on_dim: usize = on_positions.iter().map(|&i| self.factors[i].1).product();
        if op.rows() != on_dim || op.cols() != on_dim {
            return Err(Error::dim(format!(
                "operator is {}x{}, labels {:?} span dimension {}",
                op.rows(),
                op.cols(),
                on,
                on_dim
            )));
        }
        let rest: Vec<usize> =
            (0..self.len()).filter(|i| !on_positions.contains(i)).collect();
        let rest_dim: usize = rest.iter().map(|&i| self.factors[i].1).product();
        let big = kron(op, &CMatrix::identity(rest_dim));

        // `big` acts on factor order [on..., rest...]; permute to this
        // space's order. New slot s (master factor s) pulls from the
        // current position of factor s in that concatenated list.
        let current: Vec<usize> = on_positions.iter().chain(rest.iter()).copied().collect();
        let current_dims: Vec<usize> = current.iter().map(|&i| self.factors[i].1).collect();
        let perm: Vec<usize> = (0..self.len())
            .map(|master| current.iter().position(|&c| c == master).expect("factor accounted"))
            .collect();
        permute_subsystems(&big, &current_dims, &perm)
    }
}

impl std::fmt::Display for CompositeSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.factors.iter().map(|(l, d)| format!("{}:{}", l, d)).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    fn pauli_x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn embed_on_trailing_factor() {
        let sp = CompositeSpace::new(&[("a", 2), ("b", 2)]).unwrap();
        let lifted = sp.embed(&pauli_x(), &["b"]).unwrap();
        let expected = kron(&CMatrix::identity(2), &pauli_x());
        assert!(lifted.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn embed_on_leading_factor() {
        let sp = CompositeSpace::new(&[("a", 2), ("b", 3)]).unwrap();
        let lifted = sp.embed(&pauli_z(), &["a"]).unwrap();
        let expected = kron(&pauli_z(), &CMatrix::identity(3));
        assert!(lifted.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn embed_respects_listed_label_order() {
        // Operator given on (b, a); embedding must transpose it into the
        // space's (a, b) order.
        let sp = CompositeSpace::new(&[("a", 2), ("b", 2)]).unwrap();
        let zx = kron(&pauli_z(), &pauli_x()); // acts on (b, a): Z on b, X on a
        let lifted = sp.embed(&zx, &["b", "a"]).unwrap();
        let expected = kron(&pauli_x(), &pauli_z());
        assert!(lifted.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn embed_two_of_three_with_gap() {
        let sp = CompositeSpace::new(&[("a", 2), ("m", 3), ("b", 2)]).unwrap();
        let xx = kron(&pauli_x(), &pauli_x());
        let lifted = sp.embed(&xx, &["a", "b"]).unwrap();
        let expected = kron(&kron(&pauli_x(), &CMatrix::identity(3)), &pauli_x());
        assert!(lifted.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn subspace_keeps_master_order() {
        let sp = CompositeSpace::new(&[("a", 2), ("m", 3), ("b", 5)]).unwrap();
        let sub = sp.subspace(&["b", "a"]).unwrap();
        assert_eq!(sub.labels(), vec!["a", "b"]);
        assert_eq!(sub.dims(), vec![2, 5]);
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        assert!(CompositeSpace::new(&[("a", 2), ("a", 2)]).is_err());
        let sp = CompositeSpace::new(&[("a", 2)]).unwrap();
        assert!(sp.index_of("zz").is_err());
        assert!(sp.embed(&pauli_x(), &["zz"]).is_err());
        let sp2 = CompositeSpace::new(&[("a", 2), ("b", 2)]).unwrap();
        assert!(sp2.embed(&pauli_x(), &["a", "a"]).is_err());
    }

    #[test]
    fn rename_and_without() {
        let sp = CompositeSpace::new(&[("a", 2), ("b", 3)]).unwrap();
        let r = sp.renamed("a", "c").unwrap();
        assert_eq!(r.labels(), vec!["c", "b"]);
        let w = sp.without(&["a"]).unwrap();
        assert_eq!(w.labels(), vec!["b"]);
        assert!(sp.renamed("a", "b").is_err());
    }
}
