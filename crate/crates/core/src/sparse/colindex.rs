//! Linked-list index for column-wise traversal of a CSR matrix.

use super::csr::CsrMatrix;

const NIL: usize = usize::MAX;

/// Per-column singly linked lists over the entries of a [`CsrMatrix`].
///
/// `first_in_col[j]` heads the list for column j; `next_in_col[e]` chains
/// entry indices and `row_of[e]` gives the owning row. Rows are visited in
/// strictly increasing order, so column traversal enumerates exactly the
/// entries row traversal does.
#[derive(Debug, Clone)]
pub struct ColumnCursorIndex {
    first_in_col: Vec<usize>,
    next_in_col: Vec<usize>,
    row_of: Vec<usize>,
}

impl ColumnCursorIndex {
    pub fn build(a: &CsrMatrix) -> Self {
        let n = a.n();
        let nnz = a.nnz();
        let mut first_in_col = vec![NIL; n];
        let mut next_in_col = vec![NIL; nnz];
        let mut row_of = vec![0usize; nnz];
        // Walk rows backwards and prepend, leaving each list sorted by row.
        for i in (0..n).rev() {
            let (lo, hi) = (a.row_ptr()[i], a.row_ptr()[i + 1]);
            for e in (lo..hi).rev() {
                let j = a.col_idx()[e];
                row_of[e] = i;
                next_in_col[e] = first_in_col[j];
                first_in_col[j] = e;
            }
        }
        ColumnCursorIndex {
            first_in_col,
            next_in_col,
            row_of,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.first_in_col.len()
    }

    pub fn n_entries(&self) -> usize {
        self.next_in_col.len()
    }

    /// (row, value) pairs of column `j`, rows ascending.
    ///
    /// `a` must be the matrix the index was built from.
    pub fn col_entries<'a>(
        &'a self,
        a: &'a CsrMatrix,
        j: usize,
    ) -> impl Iterator<Item = (usize, f64)> + 'a {
        debug_assert_eq!(a.nnz(), self.n_entries());
        self.col_entry_indices(j)
            .map(move |e| (self.row_of[e], a.values()[e]))
    }

    /// Raw entry indices of column `j`, rows ascending.
    pub fn col_entry_indices(&self, j: usize) -> ColEntries<'_> {
        ColEntries {
            index: self,
            cursor: self.first_in_col[j],
        }
    }
}

pub struct ColEntries<'a> {
    index: &'a ColumnCursorIndex,
    cursor: usize,
}

impl Iterator for ColEntries<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cursor == NIL {
            return None;
        }
        let e = self.cursor;
        self.cursor = self.index.next_in_col[e];
        Some(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_columns_are_diagonal() {
        let a = CsrMatrix::identity(3);
        let idx = ColumnCursorIndex::build(&a);
        for j in 0..3 {
            let col: Vec<(usize, f64)> = idx.col_entries(&a, j).collect();
            assert_eq!(col, vec![(j, 1.0)]);
        }
    }

    #[test]
    fn column_rows_ascend() {
        let a =
            CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)])
                .unwrap();
        let idx = ColumnCursorIndex::build(&a);
        let col0: Vec<(usize, f64)> = idx.col_entries(&a, 0).collect();
        assert_eq!(col0, vec![(0, 2.0), (1, -1.0)]);
    }
}
