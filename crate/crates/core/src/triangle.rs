//! Strictly triangular sparse storage shared by the inverse factors (W, Z)
//! and the incomplete LDU factors (L, U).
//!
//! A factor is a sequence of `n` lanes, one per elimination step. A lane is
//! a row for row-stored factors (W, L) and a column for column-stored ones
//! (Z, U). Lane `j` only holds indices `< j`; the unit diagonal is implicit
//! and never stored. Lanes are frozen in order as the factorization
//! progresses, so the backing arrays grow append-only.

use crate::sparse::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseTriangle {
    n: usize,
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SparseTriangle {
    pub(crate) fn new(n: usize) -> Self {
        SparseTriangle {
            n,
            ptr: vec![0],
            idx: Vec::new(),
            val: Vec::new(),
        }
    }

    /// Appends the next lane. Entries must be sorted by index, strictly
    /// below the lane number.
    pub(crate) fn push_lane(&mut self, entries: &[(usize, f64)]) {
        let lane = self.ptr.len() - 1;
        debug_assert!(lane < self.n, "more lanes than the dimension allows");
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(i, _)| i < lane));
        for &(i, v) in entries {
            self.idx.push(i);
            self.val.push(v);
        }
        self.ptr.push(self.idx.len());
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored strict-triangle entry count.
    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    /// Indices and values of lane `j`, sorted ascending.
    pub fn lane(&self, j: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.ptr[j], self.ptr[j + 1]);
        (&self.idx[lo..hi], &self.val[lo..hi])
    }

    /// Entry at position `index` within lane `lane`; 0.0 when absent.
    pub fn get(&self, lane: usize, index: usize) -> f64 {
        let (idx, val) = self.lane(lane);
        match idx.binary_search(&index) {
            Ok(pos) => val[pos],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as (lane, index, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            let (idx, val) = self.lane(j);
            idx.iter().zip(val.iter()).map(move |(&i, &v)| (j, i, v))
        })
    }

    /// Dense unit lower-triangular matrix reading lanes as rows
    /// (entry (lane, index)); used by W and L.
    pub fn to_dense_unit_lower(&self) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.n);
        for (lane, index, v) in self.entries() {
            m.set(lane, index, v);
        }
        m
    }

    /// Dense unit upper-triangular matrix reading lanes as columns
    /// (entry (index, lane)); used by Z and U.
    pub fn to_dense_unit_upper(&self) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.n);
        for (lane, index, v) in self.entries() {
            m.set(index, lane, v);
        }
        m
    }
}

/// Dense work vector with an occupied-index list, reset incrementally.
#[derive(Debug)]
pub(crate) struct SparseAccumulator {
    val: Vec<f64>,
    mark: Vec<bool>,
    occupied: Vec<usize>,
}

impl SparseAccumulator {
    pub fn new(n: usize) -> Self {
        SparseAccumulator {
            val: vec![0.0; n],
            mark: vec![false; n],
            occupied: Vec::new(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.val[i]
    }

    #[inline]
    pub fn add(&mut self, i: usize, delta: f64) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.occupied.push(i);
        }
        self.val[i] += delta;
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: f64) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.occupied.push(i);
        }
        self.val[i] = v;
    }

    /// Zeroes every slot whose magnitude is below `tau`. No-op for tau == 0.
    pub fn purge_below(&mut self, tau: f64) {
        if tau == 0.0 {
            return;
        }
        let val = &mut self.val;
        let mark = &mut self.mark;
        self.occupied.retain(|&i| {
            if val[i].abs() < tau {
                val[i] = 0.0;
                mark[i] = false;
                false
            } else {
                true
            }
        });
    }

    /// Drains into a sorted entry list, keeping values with `|v| >= tau`
    /// (exact zeros are never kept). Leaves the accumulator clean.
    pub fn take_sorted(&mut self, tau: f64) -> Vec<(usize, f64)> {
        self.occupied.sort_unstable();
        let mut out = Vec::with_capacity(self.occupied.len());
        for &i in &self.occupied {
            let v = self.val[i];
            self.val[i] = 0.0;
            self.mark[i] = false;
            if v != 0.0 && v.abs() >= tau {
                out.push((i, v));
            }
        }
        self.occupied.clear();
        out
    }

    /// Clears without extracting.
    pub fn clear(&mut self) {
        for &i in &self.occupied {
            self.val[i] = 0.0;
            self.mark[i] = false;
        }
        self.occupied.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanes_freeze_in_order() {
        let mut t = SparseTriangle::new(3);
        t.push_lane(&[]);
        t.push_lane(&[(0, 0.5)]);
        t.push_lane(&[(0, -1.0), (1, 2.0)]);
        assert_eq!(t.nnz(), 3);
        assert_eq!(t.lane(2), (&[0usize, 1][..], &[-1.0, 2.0][..]));
        assert_eq!(t.get(2, 1), 2.0);
        assert_eq!(t.get(2, 2), 0.0);
    }

    #[test]
    fn accumulator_purge_and_take() {
        let mut spa = SparseAccumulator::new(4);
        spa.add(2, 0.05);
        spa.add(0, 1.0);
        spa.add(3, -0.2);
        spa.purge_below(0.1);
        assert_eq!(spa.get(2), 0.0);
        let taken = spa.take_sorted(0.0);
        assert_eq!(taken, vec![(0, 1.0), (3, -0.2)]);
        // accumulator is reusable afterwards
        spa.add(1, 2.0);
        assert_eq!(spa.take_sorted(0.0), vec![(1, 2.0)]);
    }
}
