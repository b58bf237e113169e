//! Subsystem bookkeeping for bipartite operators.

use super::LinalgError;

/// Which party holds a subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// One subsystem: owning party, dimension, and whether the last basis
/// level is the erasure symbol (making the logical dimension `dim - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Part {
    pub party: Party,
    pub dim: usize,
    pub erasure_extended: bool,
}

impl Part {
    pub fn new(party: Party, dim: usize) -> Self {
        Self {
            party,
            dim,
            erasure_extended: false,
        }
    }

    pub fn erasure_extended(party: Party, dim: usize) -> Self {
        Self {
            party,
            dim,
            erasure_extended: true,
        }
    }
}

/// Ordered subsystem dimensions defining the bipartite cut A:B.
///
/// Subsystem order is fixed as listed; operators annotated by a
/// `SystemDims` are indexed row-major over the parts in this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemDims {
    parts: Vec<Part>,
}

impl SystemDims {
    pub fn new(parts: Vec<Part>) -> Result<Self, LinalgError> {
        if parts.is_empty() {
            return Err(LinalgError::BadDims("no parts".into()));
        }
        if let Some(p) = parts.iter().find(|p| p.dim == 0) {
            return Err(LinalgError::BadDims(format!(
                "zero-dimensional part on side {:?}",
                p.party
            )));
        }
        Ok(Self { parts })
    }

    /// Plain bipartite system `d_A (x) d_B` with no erasure extension.
    pub fn bipartite(d_a: usize, d_b: usize) -> Self {
        Self::new(vec![Part::new(Party::A, d_a), Part::new(Party::B, d_b)])
            .expect("positive dims")
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim).product()
    }

    pub fn party_dim(&self, party: Party) -> usize {
        self.parts
            .iter()
            .filter(|p| p.party == party)
            .map(|p| p.dim)
            .product()
    }

    pub fn indices_of(&self, party: Party) -> Vec<usize> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.party == party)
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks the bipartite invariant: at least one part on each side.
    pub fn require_bipartite(&self) -> Result<(), LinalgError> {
        if self.indices_of(Party::A).is_empty() || self.indices_of(Party::B).is_empty() {
            return Err(LinalgError::BadDims(
                "bipartite operations need at least one A-side and one B-side part".into(),
            ));
        }
        Ok(())
    }

    pub fn require_matches(&self, matrix_dim: usize) -> Result<(), LinalgError> {
        if self.total_dim() != matrix_dim {
            return Err(LinalgError::DimensionMismatch {
                context: "product of part dims must equal operator dimension",
                expected: self.total_dim(),
                got: matrix_dim,
            });
        }
        Ok(())
    }

    /// True when all A-side parts come before all B-side parts.
    pub fn is_a_first(&self) -> bool {
        let first_b = self.parts.iter().position(|p| p.party == Party::B);
        match first_b {
            None => true,
            Some(i) => self.parts[i..].iter().all(|p| p.party == Party::B),
        }
    }

    /// Permutation that lists all A-side parts (in order) before all
    /// B-side parts (in order).
    pub fn a_first_permutation(&self) -> Vec<usize> {
        let mut perm = self.indices_of(Party::A);
        perm.extend(self.indices_of(Party::B));
        perm
    }

    /// Reordered dims under `new_from_old[j] = old index of new part j`.
    pub fn permuted(&self, new_from_old: &[usize]) -> Self {
        assert_eq!(new_from_old.len(), self.parts.len());
        Self {
            parts: new_from_old.iter().map(|&i| self.parts[i]).collect(),
        }
    }

    /// Decomposes a flat matrix index into per-part indices.
    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.parts.len()];
        for (slot, part) in out.iter_mut().zip(&self.parts).rev() {
            *slot = index % part.dim;
            index /= part.dim;
        }
        out
    }

    /// Recombines per-part indices into a flat matrix index.
    pub fn flatten(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.parts.len());
        let mut index = 0usize;
        for (i, part) in multi.iter().zip(&self.parts) {
            debug_assert!(*i < part.dim);
            index = index * part.dim + i;
        }
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_roundtrip() {
        let dims = SystemDims::new(vec![
            Part::new(Party::A, 2),
            Part::new(Party::A, 3),
            Part::new(Party::B, 4),
        ])
        .unwrap();
        assert_eq!(dims.total_dim(), 24);
        for i in 0..24 {
            assert_eq!(dims.flatten(&dims.unflatten(i)), i);
        }
    }

    #[test]
    fn party_dims_and_ordering() {
        let dims = SystemDims::new(vec![
            Part::new(Party::A, 2),
            Part::new(Party::B, 3),
            Part::new(Party::A, 5),
        ])
        .unwrap();
        assert_eq!(dims.party_dim(Party::A), 10);
        assert_eq!(dims.party_dim(Party::B), 3);
        assert!(!dims.is_a_first());
        assert_eq!(dims.a_first_permutation(), vec![0, 2, 1]);
    }

    #[test]
    fn rejects_zero_dims() {
        assert!(SystemDims::new(vec![Part::new(Party::A, 0)]).is_err());
    }
}
