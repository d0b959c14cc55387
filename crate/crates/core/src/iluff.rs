//! Incomplete LDU factorization obtained as a by-product of the forward
//! factored approximate inverse process.
//!
//! The inverse-factor recurrences already produce the entries of the direct
//! factors: with `W = L^-1` and `Z = U^-1`, the coefficients satisfy
//! `L_ji = beta_i^(j)` and `U_ij = alpha_i^(j)`. So the same sweep that
//! builds transient w/z vectors can store L and U instead:
//!
//! ```text
//! U_ij = d_i * (w_i . A_*j)    kept and applied to z_j when |U_ij| > tau
//! L_ji = d_i * (A_j* . z_i)    kept and applied to w_j when |L_ji| > tau
//! d_j  = 1 / (w_j . A_*j)      (general)
//! d_j  = 1 / (z_j^T A z_j)     (positive-definite mode, breakdown-free)
//! ```
//!
//! yielding `A ~= L D^-1 U`. With `tau = 0` and no breakdowns the product is
//! exact to round-off. Small entries of the transient vectors are purged
//! after every update; only L, D, U are returned.

use crate::error::{Error, Result};
use crate::fapinv::{safeguard_pivot, DropRule};
use crate::sparse::{ColumnCursorIndex, CsrMatrix};
use crate::triangle::{SparseAccumulator, SparseTriangle};

/// Pivot formula selection for [`iluff_factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotMode {
    /// `d_j = 1/(w_j . A_*j)` with the zero-pivot safeguard.
    General,
    /// `d_j = 1/(z_j^T A z_j)`; valid for positive definite matrices
    /// (symmetric or not), where it is free from breakdown. A nonpositive
    /// quadratic form is a hard error.
    PositiveDefinite,
}

/// Unit lower L (rows), diagonal D and unit upper U (columns) with
/// `A ~= L D^-1 U`.
#[derive(Debug, Clone, PartialEq)]
pub struct IlduFactors {
    l: SparseTriangle,
    u: SparseTriangle,
    d: Vec<f64>,
    breakdown_count: usize,
}

impl IlduFactors {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Strict lower triangle of L, stored by rows.
    pub fn l(&self) -> &SparseTriangle {
        &self.l
    }

    /// Strict upper triangle of U, stored by columns.
    pub fn u(&self) -> &SparseTriangle {
        &self.u
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn breakdown_count(&self) -> usize {
        self.breakdown_count
    }

    /// L as a full sparse matrix including the unit diagonal.
    pub fn l_matrix(&self) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> = self.l.entries().collect();
        t.extend((0..self.n()).map(|j| (j, j, 1.0)));
        CsrMatrix::from_triplets(self.n(), &t).expect("factor triplets are in range")
    }

    /// U as a full sparse matrix including the unit diagonal.
    pub fn u_matrix(&self) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> =
            self.u.entries().map(|(lane, i, v)| (i, lane, v)).collect();
        t.extend((0..self.n()).map(|j| (j, j, 1.0)));
        CsrMatrix::from_triplets(self.n(), &t).expect("factor triplets are in range")
    }

    /// Fill metric `(nnz(L) + nnz(U)) / nnz(A)` with the diagonal factor
    /// merged into U, i.e. U contributes its strict entries plus n.
    pub fn density(&self, a: &CsrMatrix) -> f64 {
        (self.l.nnz() + self.u.nnz() + self.n()) as f64 / a.nnz() as f64
    }

    /// Applies `(L D^-1 U)^-1`: forward-substitute L, scale by d,
    /// back-substitute U.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let mut x = v.to_vec();
        // L y = v, unit lower stored by rows: streams forward
        for j in 0..n {
            let (idx, val) = self.l.lane(j);
            let mut acc = x[j];
            for (&k, &lv) in idx.iter().zip(val.iter()) {
                acc -= lv * x[k];
            }
            x[j] = acc;
        }
        for (xj, dj) in x.iter_mut().zip(self.d.iter()) {
            *xj *= dj;
        }
        // U x = y, unit upper stored by columns: streams backward
        for j in (0..n).rev() {
            let xj = x[j];
            let (idx, val) = self.u.lane(j);
            for (&i, &uv) in idx.iter().zip(val.iter()) {
                x[i] -= uv * xj;
            }
        }
        Ok(x)
    }
}

/// Computes the incomplete LDU factors. See the module docs for the
/// recurrences; the transient w/z vectors live only for the duration of
/// this call.
#[allow(clippy::needless_range_loop)] // index-driven over parallel factor state
pub fn iluff_factorize(
    a: &CsrMatrix,
    cols: &ColumnCursorIndex,
    rule: &DropRule,
    mode: PivotMode,
) -> Result<IlduFactors> {
    if cols.n_cols() != a.n() || cols.n_entries() != a.nnz() {
        return Err(Error::InvalidMatrix(
            "column index does not match the matrix it was built from".into(),
        ));
    }
    let n = a.n();
    let tau = rule.tau();
    let mut l = SparseTriangle::new(n);
    let mut u = SparseTriangle::new(n);
    let mut d: Vec<f64> = Vec::with_capacity(n);
    let mut breakdowns = 0usize;

    // Transient inverse-factor rows/columns, needed by every later step.
    let mut w = SparseTriangle::new(n);
    let mut z = SparseTriangle::new(n);

    let mut col_j = SparseAccumulator::new(n);
    let mut row_j = SparseAccumulator::new(n);
    let mut w_acc = SparseAccumulator::new(n);
    let mut z_acc = SparseAccumulator::new(n);
    let mut av = SparseAccumulator::new(n); // A z_j for the pd pivot

    for j in 0..n {
        for (i, v) in cols.col_entries(a, j) {
            col_j.set(i, v);
        }
        let (ridx, rval) = a.row(j);
        for (&k, &v) in ridx.iter().zip(rval.iter()) {
            row_j.set(k, v);
        }

        // Column j of U, updating z_j as we go.
        let mut u_col: Vec<(usize, f64)> = Vec::new();
        for i in 0..j {
            let (widx, wval) = w.lane(i);
            let mut dot = col_j.get(i);
            for (&k, &wv) in widx.iter().zip(wval.iter()) {
                dot += wv * col_j.get(k);
            }
            let u_ij = d[i] * dot;
            if !u_ij.is_finite() {
                return Err(Error::NonFinite { column: j });
            }
            if rule.keeps(u_ij) {
                u_col.push((i, u_ij));
                let (zidx, zval) = z.lane(i);
                z_acc.add(i, -u_ij);
                for (&k, &zv) in zidx.iter().zip(zval.iter()) {
                    z_acc.add(k, -u_ij * zv);
                }
                z_acc.purge_below(tau);
            }
        }

        // Row j of L, updating w_j.
        let mut l_row: Vec<(usize, f64)> = Vec::new();
        for i in 0..j {
            let (zidx, zval) = z.lane(i);
            let mut dot = row_j.get(i);
            for (&k, &zv) in zidx.iter().zip(zval.iter()) {
                dot += zv * row_j.get(k);
            }
            let l_ji = d[i] * dot;
            if !l_ji.is_finite() {
                return Err(Error::NonFinite { column: j });
            }
            if rule.keeps(l_ji) {
                l_row.push((i, l_ji));
                let (widx, wval) = w.lane(i);
                w_acc.add(i, -l_ji);
                for (&k, &wv) in widx.iter().zip(wval.iter()) {
                    w_acc.add(k, -l_ji * wv);
                }
                w_acc.purge_below(tau);
            }
        }

        let w_row = w_acc.take_sorted(tau);
        let z_col = z_acc.take_sorted(tau);
        let a_jj = col_j.get(j);

        let denom = match mode {
            PivotMode::General => {
                let mut denom = a_jj;
                for &(k, wv) in &w_row {
                    denom += wv * col_j.get(k);
                }
                if !denom.is_finite() {
                    return Err(Error::NonFinite { column: j });
                }
                safeguard_pivot(denom, a_jj, &mut breakdowns)
            }
            PivotMode::PositiveDefinite => {
                // q = z_j^T A z_j with z_j = e_j plus the strict part
                for &(k, zv) in &z_col {
                    for (row, av_val) in cols.col_entries(a, k) {
                        av.add(row, av_val * zv);
                    }
                }
                for (row, av_val) in cols.col_entries(a, j) {
                    av.add(row, av_val);
                }
                let mut q = av.get(j);
                for &(k, zv) in &z_col {
                    q += zv * av.get(k);
                }
                av.clear();
                if !q.is_finite() {
                    return Err(Error::NonFinite { column: j });
                }
                if q <= 0.0 {
                    return Err(Error::NotPositiveDefinite { column: j });
                }
                safeguard_pivot(q, a_jj, &mut breakdowns)
            }
        };
        d.push(1.0 / denom);

        l.push_lane(&l_row);
        u.push_lane(&u_col);
        w.push_lane(&w_row);
        z.push_lane(&z_col);
        col_j.clear();
        row_j.clear();
    }

    Ok(IlduFactors {
        l,
        u,
        d,
        breakdown_count: breakdowns,
    })
}
