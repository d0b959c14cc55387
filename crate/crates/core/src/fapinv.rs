//! Forward factored (approximate) inverse.
//!
//! Computes unit-triangular W (stored by rows), Z (stored by columns) and a
//! diagonal D with
//!
//! ```text
//! W A Z = D^-1        so        A^-1 = Z D W
//! ```
//!
//! Column/row j is assembled from all earlier ones:
//!
//! ```text
//! alpha_i = d_i * (w_i . A_*j)     z_j := z_j - alpha_i z_i
//! beta_i  = d_i * (A_j* . z_i)     w_j := w_j - beta_i w_i
//! d_j     = 1 / (w_j . A_*j)
//! ```
//!
//! The approximate variant zeroes `alpha`/`beta` whose magnitude falls below
//! the drop tolerance (skipping their updates) and purges small entries from
//! each finished row/column. Dropping is applied at those four sites only.
//!
//! Two routes are provided: [`ffinv_vector`] is the production kernel working
//! on whole sparse rows/columns, [`ffinv_scalar`] evaluates the entrywise
//! recurrences with direct element lookups. They produce identical factors
//! and exist so each one checks the other.

use crate::error::{Error, Result};
use crate::sparse::{ColumnCursorIndex, CsrMatrix};
use crate::triangle::{SparseAccumulator, SparseTriangle};

/// Threshold below which a pivot denominator counts as broken down.
pub(crate) const PIVOT_BREAKDOWN_EPS: f64 = f64::EPSILON;

/// Replacement magnitude for a broken-down pivot: sqrt of machine precision.
pub(crate) const PIVOT_SAFEGUARD: f64 = 1.4901161193847656e-8; // f64::EPSILON.sqrt()

/// Absolute drop tolerance. `tau = 0` disables dropping entirely and the
/// factorization is exact to round-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropRule {
    tau: f64,
}

impl DropRule {
    pub fn new(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::InvalidDropTolerance(tau));
        }
        Ok(DropRule { tau })
    }

    /// No dropping: the exact factorization.
    pub fn exact() -> Self {
        DropRule { tau: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// A coefficient survives when `|x| >= tau`. Values exactly equal to the
    /// tolerance are kept; exact zeros are never stored.
    #[inline]
    pub(crate) fn keeps(&self, x: f64) -> bool {
        x != 0.0 && x.abs() >= self.tau
    }
}

/// Inverse factors W, Z, D with `W A Z ~= D^-1`.
///
/// W lanes are rows, Z lanes are columns; both unit diagonals are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseFactors {
    w: SparseTriangle,
    z: SparseTriangle,
    d: Vec<f64>,
    breakdown_count: usize,
}

impl InverseFactors {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Strict lower triangle of W, stored by rows.
    pub fn w(&self) -> &SparseTriangle {
        &self.w
    }

    /// Strict upper triangle of Z, stored by columns.
    pub fn z(&self) -> &SparseTriangle {
        &self.z
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Number of pivot safeguards triggered during construction.
    pub fn breakdown_count(&self) -> usize {
        self.breakdown_count
    }

    /// W as a full sparse matrix including the unit diagonal.
    pub fn w_matrix(&self) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> = self.w.entries().collect();
        t.extend((0..self.n()).map(|j| (j, j, 1.0)));
        CsrMatrix::from_triplets(self.n(), &t).expect("factor triplets are in range")
    }

    /// Z as a full sparse matrix including the unit diagonal.
    pub fn z_matrix(&self) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> =
            self.z.entries().map(|(lane, i, v)| (i, lane, v)).collect();
        t.extend((0..self.n()).map(|j| (j, j, 1.0)));
        CsrMatrix::from_triplets(self.n(), &t).expect("factor triplets are in range")
    }

    /// Applies `Z D W` to a vector: two sparse products and a diagonal
    /// scaling, no triangular solve.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        // u = D (W v)
        let mut u = Vec::with_capacity(n);
        for j in 0..n {
            let (idx, val) = self.w.lane(j);
            let mut acc = v[j];
            for (&k, &wv) in idx.iter().zip(val.iter()) {
                acc += wv * v[k];
            }
            u.push(acc * self.d[j]);
        }
        // out = Z u
        let mut out = u.clone();
        for (j, &uj) in u.iter().enumerate() {
            let (idx, val) = self.z.lane(j);
            for (&i, &zv) in idx.iter().zip(val.iter()) {
                out[i] += zv * uj;
            }
        }
        Ok(out)
    }
}

/// Optional per-step recording of the scalar coefficients, for testing.
/// `alpha[j]`/`beta[j]` hold the values used at step j (after dropping);
/// `l[j]`/`u[j]` hold the raw recurrence sums.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientTrace {
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub l: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
}

fn check_index(a: &CsrMatrix, cols: &ColumnCursorIndex) -> Result<()> {
    if cols.n_cols() != a.n() || cols.n_entries() != a.nnz() {
        return Err(Error::InvalidMatrix(
            "column index does not match the matrix it was built from".into(),
        ));
    }
    Ok(())
}

/// Resolves a pivot denominator, applying the safeguard on breakdown.
/// Returns the (possibly replaced) denominator.
pub(crate) fn safeguard_pivot(denom: f64, a_jj: f64, breakdowns: &mut usize) -> f64 {
    if denom.abs() < PIVOT_BREAKDOWN_EPS {
        *breakdowns += 1;
        if a_jj < 0.0 {
            -PIVOT_SAFEGUARD
        } else {
            PIVOT_SAFEGUARD
        }
    } else {
        denom
    }
}

/// FFINV/FFAPINV, vector form.
///
/// With `tau = 0` the factors are exact: `W A Z = D^-1` to round-off.
#[allow(clippy::needless_range_loop)] // index-driven over parallel factor state
pub fn ffinv_vector(
    a: &CsrMatrix,
    cols: &ColumnCursorIndex,
    rule: &DropRule,
) -> Result<InverseFactors> {
    check_index(a, cols)?;
    let n = a.n();
    let mut w = SparseTriangle::new(n);
    let mut z = SparseTriangle::new(n);
    let mut d: Vec<f64> = Vec::with_capacity(n);
    let mut breakdowns = 0usize;

    let mut col_j = SparseAccumulator::new(n); // A_*j scattered
    let mut row_j = SparseAccumulator::new(n); // A_j* scattered
    let mut w_acc = SparseAccumulator::new(n); // strict part of w_j
    let mut z_acc = SparseAccumulator::new(n); // strict part of z_j

    for j in 0..n {
        for (i, v) in cols.col_entries(a, j) {
            col_j.set(i, v);
        }
        let (ridx, rval) = a.row(j);
        for (&k, &v) in ridx.iter().zip(rval.iter()) {
            row_j.set(k, v);
        }

        for i in 0..j {
            let (widx, wval) = w.lane(i);
            let mut dot_w = col_j.get(i);
            for (&k, &wv) in widx.iter().zip(wval.iter()) {
                dot_w += wv * col_j.get(k);
            }
            let alpha = d[i] * dot_w;

            let (zidx, zval) = z.lane(i);
            let mut dot_z = row_j.get(i);
            for (&k, &zv) in zidx.iter().zip(zval.iter()) {
                dot_z += zv * row_j.get(k);
            }
            let beta = d[i] * dot_z;

            if !alpha.is_finite() || !beta.is_finite() {
                return Err(Error::NonFinite { column: j });
            }

            if rule.keeps(alpha) {
                z_acc.add(i, -alpha);
                for (&k, &zv) in zidx.iter().zip(zval.iter()) {
                    z_acc.add(k, -alpha * zv);
                }
            }
            if rule.keeps(beta) {
                w_acc.add(i, -beta);
                for (&k, &wv) in widx.iter().zip(wval.iter()) {
                    w_acc.add(k, -beta * wv);
                }
            }
        }

        // Purge before the pivot: d_j sees the row as it will be stored.
        let w_row = w_acc.take_sorted(rule.tau);
        let z_col = z_acc.take_sorted(rule.tau);

        let a_jj = col_j.get(j);
        let mut denom = a_jj;
        for &(k, wv) in &w_row {
            denom += wv * col_j.get(k);
        }
        if !denom.is_finite() {
            return Err(Error::NonFinite { column: j });
        }
        let denom = safeguard_pivot(denom, a_jj, &mut breakdowns);
        d.push(1.0 / denom);

        w.push_lane(&w_row);
        z.push_lane(&z_col);
        col_j.clear();
        row_j.clear();
    }

    Ok(InverseFactors {
        w,
        z,
        d,
        breakdown_count: breakdowns,
    })
}

/// FFINV/FFAPINV, scalar form: evaluates the entrywise recurrences
///
/// ```text
/// l_i = a_ji + sum_{k<i} a_jk z_ki          beta_i = l_i d_i
/// w_ji = -beta_i - sum_{k>i} beta_k w_ki
/// d_j  = 1 / (a_jj + sum_k w_jk a_kj)
/// u_i = a_ij + sum_{k<i} w_ik a_kj          alpha_i = u_i d_i
/// z_ij = -alpha_i - sum_{k>i} alpha_k z_ik
/// ```
///
/// with dropping on `beta`, `w_ji`, `alpha` and `z_ij`. Produces the same
/// factors as [`ffinv_vector`] for any matrix and any tolerance. Uses direct
/// element lookups, costing up to O(n^3); intended for validation runs.
#[allow(clippy::needless_range_loop)] // index-driven over parallel factor state
pub fn ffinv_scalar(
    a: &CsrMatrix,
    cols: &ColumnCursorIndex,
    rule: &DropRule,
    trace_enabled: bool,
) -> Result<(InverseFactors, CoefficientTrace)> {
    check_index(a, cols)?;
    let n = a.n();
    let mut w = SparseTriangle::new(n);
    let mut z = SparseTriangle::new(n);
    let mut d: Vec<f64> = Vec::with_capacity(n);
    let mut breakdowns = 0usize;
    let mut trace = CoefficientTrace::default();

    let mut col_j = SparseAccumulator::new(n);
    let mut row_j = SparseAccumulator::new(n);

    for j in 0..n {
        for (i, v) in cols.col_entries(a, j) {
            col_j.set(i, v);
        }
        let (ridx, rval) = a.row(j);
        for (&k, &v) in ridx.iter().zip(rval.iter()) {
            row_j.set(k, v);
        }

        // beta_i = d_i (a_ji + sum_{k<i} a_jk z_ki)
        let mut l_raw = vec![0.0; j];
        let mut beta = vec![0.0; j];
        for i in 0..j {
            let (zidx, zval) = z.lane(i);
            let mut l = row_j.get(i);
            for (&k, &zv) in zidx.iter().zip(zval.iter()) {
                l += row_j.get(k) * zv;
            }
            let b = l * d[i];
            if !b.is_finite() {
                return Err(Error::NonFinite { column: j });
            }
            l_raw[i] = l;
            beta[i] = if rule.keeps(b) { b } else { 0.0 };
        }

        // w_ji = -beta_i - sum_{k>i} beta_k w_ki, dropped on its final value
        let mut w_row: Vec<(usize, f64)> = Vec::new();
        for i in 0..j {
            let mut sum = -beta[i];
            for (k, &bk) in beta.iter().enumerate().skip(i + 1) {
                if bk != 0.0 {
                    let wki = w.get(k, i);
                    if wki != 0.0 {
                        sum -= bk * wki;
                    }
                }
            }
            if !sum.is_finite() {
                return Err(Error::NonFinite { column: j });
            }
            if rule.keeps(sum) {
                w_row.push((i, sum));
            }
        }

        // d_j from the dropped row
        let a_jj = col_j.get(j);
        let mut denom = a_jj;
        for &(k, wv) in &w_row {
            denom += wv * col_j.get(k);
        }
        if !denom.is_finite() {
            return Err(Error::NonFinite { column: j });
        }
        let denom = safeguard_pivot(denom, a_jj, &mut breakdowns);
        d.push(1.0 / denom);

        // alpha_i = d_i (a_ij + sum_{k<i} w_ik a_kj), iterating the stored
        // column of A and looking elements up in the frozen rows of W
        let mut u_raw = vec![0.0; j];
        let mut alpha = vec![0.0; j];
        for i in 0..j {
            let mut u = col_j.get(i);
            for (k, akj) in cols.col_entries(a, j) {
                if k >= i {
                    break;
                }
                let wik = w.get(i, k);
                if wik != 0.0 {
                    u += wik * akj;
                }
            }
            let al = u * d[i];
            if !al.is_finite() {
                return Err(Error::NonFinite { column: j });
            }
            u_raw[i] = u;
            alpha[i] = if rule.keeps(al) { al } else { 0.0 };
        }

        // z_ij = -alpha_i - sum_{k>i} alpha_k z_ik
        let mut z_col: Vec<(usize, f64)> = Vec::new();
        for i in 0..j {
            let mut sum = -alpha[i];
            for (k, &ak) in alpha.iter().enumerate().skip(i + 1) {
                if ak != 0.0 {
                    let zik = z.get(k, i);
                    if zik != 0.0 {
                        sum -= ak * zik;
                    }
                }
            }
            if !sum.is_finite() {
                return Err(Error::NonFinite { column: j });
            }
            if rule.keeps(sum) {
                z_col.push((i, sum));
            }
        }

        if trace_enabled {
            trace.alpha.push(alpha);
            trace.beta.push(beta);
            trace.l.push(l_raw);
            trace.u.push(u_raw);
        }

        w.push_lane(&w_row);
        z.push_lane(&z_col);
        col_j.clear();
        row_j.clear();
    }

    Ok((
        InverseFactors {
            w,
            z,
            d,
            breakdown_count: breakdowns,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::DenseMatrix;

    fn two_by_two() -> CsrMatrix {
        CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)])
            .unwrap()
    }

    fn factor(a: &CsrMatrix, tau: f64) -> InverseFactors {
        let cols = ColumnCursorIndex::build(a);
        ffinv_vector(a, &cols, &DropRule::new(tau).unwrap()).unwrap()
    }

    #[test]
    fn identity_factors_are_trivial() {
        let a = CsrMatrix::identity(4);
        let f = factor(&a, 0.0);
        assert_eq!(f.w().nnz(), 0);
        assert_eq!(f.z().nnz(), 0);
        assert_eq!(f.d(), &[1.0; 4]);
        assert_eq!(f.breakdown_count(), 0);
    }

    #[test]
    fn exact_2x2_factors() {
        let a = two_by_two();
        let f = factor(&a, 0.0);
        assert_eq!(f.d(), &[0.5, 2.0 / 3.0]);
        assert_eq!(f.w().get(1, 0), 0.5);
        assert_eq!(f.z().get(1, 0), 0.5);

        // Z diag(d) W must equal the dense inverse (1/3)[[2,1],[1,2]]
        let zdense = f.z().to_dense_unit_upper();
        let wdense = f.w().to_dense_unit_lower();
        let mut dd = DenseMatrix::zeros(2);
        for (i, &di) in f.d().iter().enumerate() {
            dd.set(i, i, di);
        }
        let inv = zdense.matmul(&dd).matmul(&wdense);
        let want = DenseMatrix::from_csr(&a).inverse().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv.get(i, j) - want.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn scalar_form_matches_and_traces() {
        let a = two_by_two();
        let cols = ColumnCursorIndex::build(&a);
        let (f, trace) = ffinv_scalar(&a, &cols, &DropRule::exact(), true).unwrap();
        assert_eq!(f, factor(&a, 0.0));
        // alpha_1^(2) = beta_1^(2) = -1/2 in 1-based indexing
        assert_eq!(trace.alpha[1], vec![-0.5]);
        assert_eq!(trace.beta[1], vec![-0.5]);
    }

    #[test]
    fn scalar_trace_on_identity_is_empty_offdiagonal() {
        let a = CsrMatrix::identity(3);
        let cols = ColumnCursorIndex::build(&a);
        let (f, trace) = ffinv_scalar(&a, &cols, &DropRule::exact(), true).unwrap();
        assert_eq!(f.w().nnz(), 0);
        assert_eq!(f.z().nnz(), 0);
        assert!(trace.alpha.iter().all(|v| v.iter().all(|&x| x == 0.0)));
        assert!(trace.beta.iter().all(|v| v.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn apply_factored_inverse_examples() {
        let id = CsrMatrix::identity(3);
        let f = factor(&id, 0.0);
        let v = vec![3.0, -1.0, 0.5];
        assert_eq!(f.apply(&v).unwrap(), v);

        let a = two_by_two();
        let f = factor(&a, 0.0);
        let x = f.apply(&[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);

        assert!(matches!(
            f.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_pivot_triggers_safeguard() {
        // a_11 = 0 breaks down immediately
        let a = CsrMatrix::from_triplets(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let f = factor(&a, 0.0);
        assert!(f.breakdown_count() >= 1);
        assert!(f.d().iter().all(|v| v.is_finite() && *v != 0.0));
    }

    #[test]
    fn nan_entry_is_a_hard_error_naming_the_column() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, f64::NAN)]).unwrap();
        let cols = ColumnCursorIndex::build(&a);
        let err = ffinv_vector(&a, &cols, &DropRule::exact()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { column: 1 }));
        let err = ffinv_scalar(&a, &cols, &DropRule::exact(), false).unwrap_err();
        assert!(matches!(err, Error::NonFinite { column: 1 }));
    }

    #[test]
    fn drop_rule_validation() {
        assert!(DropRule::new(-0.1).is_err());
        assert!(DropRule::new(f64::NAN).is_err());
        assert_eq!(DropRule::exact().tau(), 0.0);
    }

    #[test]
    fn drop_rule_keeps_equality() {
        let rule = DropRule::new(0.1).unwrap();
        assert!(rule.keeps(0.1));
        assert!(rule.keeps(-0.1));
        assert!(!rule.keeps(0.0999));
        assert!(!rule.keeps(0.0));
    }

    #[test]
    fn factor_matrices_include_unit_diagonal() {
        let a = two_by_two();
        let f = factor(&a, 0.0);
        let w = f.w_matrix();
        assert_eq!(w.get(0, 0), 1.0);
        assert_eq!(w.get(1, 1), 1.0);
        assert_eq!(w.get(1, 0), 0.5);
        let z = f.z_matrix();
        assert_eq!(z.get(0, 1), 0.5);
    }
}
