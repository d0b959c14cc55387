//! Compressed sparse row storage, the canonical format for system matrices.

use crate::error::{Error, Result};

/// Square sparse matrix in compressed sparse row (CSR) form.
///
/// `row_ptr` has `n + 1` non-decreasing offsets into `col_idx`/`values`;
/// within each row the column indices are strictly increasing. Exact zeros
/// are dropped by the builder, so `nnz` counts structural nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from (row, col, value) triplets.
    ///
    /// Duplicate coordinates are summed; entries that are exactly zero after
    /// summation are dropped. Indices must lie in `[0, n)`.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) out of range for dimension {n}"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut k = 0;
        for row in 0..n {
            while k < sorted.len() && sorted[k].0 == row {
                let col = sorted[k].1;
                let mut v = sorted[k].2;
                k += 1;
                while k < sorted.len() && sorted[k].0 == row && sorted[k].1 == col {
                    v += sorted[k].2;
                    k += 1;
                }
                if v != 0.0 {
                    col_idx.push(col);
                    values.push(v);
                }
            }
            row_ptr[row + 1] = col_idx.len();
        }
        Ok(CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Value at (i, j); 0.0 when the entry is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as (row, col, value), in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals.iter()).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals.iter()).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// Largest absolute entry (0.0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Comparison matrix: |a_ii| on the diagonal, -|a_ij| off it.
    /// Shares the sparsity pattern of `self`.
    pub fn comparison_matrix(&self) -> CsrMatrix {
        let mut out = self.clone();
        for i in 0..out.n {
            let (lo, hi) = (out.row_ptr[i], out.row_ptr[i + 1]);
            for k in lo..hi {
                let a = out.values[k].abs();
                out.values[k] = if out.col_idx[k] == i { a } else { -a };
            }
        }
        out
    }

    /// Checks the structural invariants; used by tests and debug assertions.
    pub fn check_invariants(&self) -> Result<()> {
        if self.row_ptr.len() != self.n + 1 || self.row_ptr[0] != 0 {
            return Err(Error::InvalidMatrix("bad row_ptr shape".into()));
        }
        if self.row_ptr[self.n] != self.col_idx.len() || self.col_idx.len() != self.values.len() {
            return Err(Error::InvalidMatrix("row_ptr does not cover nnz".into()));
        }
        for i in 0..self.n {
            if self.row_ptr[i] > self.row_ptr[i + 1] {
                return Err(Error::InvalidMatrix("row_ptr not non-decreasing".into()));
            }
            let (cols, _) = self.row(i);
            for w in cols.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidMatrix(format!(
                        "row {i}: columns not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = cols.last() {
                if last >= self.n {
                    return Err(Error::InvalidMatrix(format!(
                        "row {i}: column out of range"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_sums_duplicates_and_drops_zeros() {
        let a = CsrMatrix::from_triplets(
            2,
            &[
                (0, 0, 1.0),
                (0, 0, 1.0),
                (0, 1, 3.0),
                (0, 1, -3.0),
                (1, 1, 2.0),
            ],
        )
        .unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.get(1, 1), 2.0);
        a.check_invariants().unwrap();
    }

    #[test]
    fn builder_rejects_out_of_range() {
        assert!(CsrMatrix::from_triplets(2, &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn comparison_matrix_examples() {
        // already its own comparison matrix
        let a =
            CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)])
                .unwrap();
        assert_eq!(a.comparison_matrix(), a);

        // [[2,1],[1,-2]] -> [[2,-1],[-1,2]]
        let b = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -2.0)])
            .unwrap();
        assert_eq!(b.comparison_matrix(), a);

        // [[-3,2],[-2,3]] -> [[3,-2],[-2,3]]
        let c =
            CsrMatrix::from_triplets(2, &[(0, 0, -3.0), (0, 1, 2.0), (1, 0, -2.0), (1, 1, 3.0)])
                .unwrap();
        let want =
            CsrMatrix::from_triplets(2, &[(0, 0, 3.0), (0, 1, -2.0), (1, 0, -2.0), (1, 1, 3.0)])
                .unwrap();
        assert_eq!(c.comparison_matrix(), want);
    }

    #[test]
    fn comparison_matrix_idempotent() {
        let c =
            CsrMatrix::from_triplets(3, &[(0, 0, -3.0), (0, 2, 2.0), (1, 1, 4.0), (2, 0, -2.0)])
                .unwrap()
                .comparison_matrix();
        assert_eq!(c.comparison_matrix(), c);
    }

    #[test]
    fn matvec_row_sums() {
        let a =
            CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)])
                .unwrap();
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![1.0, 1.0]);
    }
}
