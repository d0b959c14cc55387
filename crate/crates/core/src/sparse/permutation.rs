//! Symmetric permutations P A P^T, read from externally produced ordering
//! files (the library ships no ordering heuristic of its own).

use super::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Bijection on {0, ..., n-1}; `perm[old] = new`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    perm: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            perm: (0..n).collect(),
        }
    }

    pub fn from_vec(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n {
                return Err(Error::InvalidPermutation(format!(
                    "target {p} out of range for length {n}"
                )));
            }
            if seen[p] {
                return Err(Error::InvalidPermutation(format!("target {p} repeated")));
            }
            seen[p] = true;
        }
        Ok(Permutation { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn map(&self, old: usize) -> usize {
        self.perm[old]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.perm.len()];
        for (old, &new) in self.perm.iter().enumerate() {
            inv[new] = old;
        }
        Permutation { perm: inv }
    }
}

/// Returns P A P^T. The entry count is preserved.
pub fn apply_permutation(a: &CsrMatrix, p: &Permutation) -> Result<CsrMatrix> {
    if p.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: p.len(),
        });
    }
    let triplets: Vec<(usize, usize, f64)> = a
        .triplets()
        .map(|(i, j, v)| (p.map(i), p.map(j), v))
        .collect();
    CsrMatrix::from_triplets(a.n(), &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_permutation_is_noop() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)])
            .unwrap();
        let p = Permutation::identity(2);
        assert_eq!(apply_permutation(&a, &p).unwrap(), a);
    }

    #[test]
    fn swap_permutes_symmetrically() {
        // swap (0,1) on [[1,2],[3,4]] -> [[4,3],[2,1]]
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)])
            .unwrap();
        let p = Permutation::from_vec(vec![1, 0]).unwrap();
        let b = apply_permutation(&a, &p).unwrap();
        assert_eq!(b.get(0, 0), 4.0);
        assert_eq!(b.get(0, 1), 3.0);
        assert_eq!(b.get(1, 0), 2.0);
        assert_eq!(b.get(1, 1), 1.0);
        assert_eq!(b.nnz(), a.nnz());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_vec(vec![0, 0]).is_err());
        assert!(Permutation::from_vec(vec![0, 2]).is_err());
    }
}
