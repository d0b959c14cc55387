//! Dense row-major matrices, used as brute-force oracles and for the
//! M-/H-matrix classification checks. Everything here is O(n^2) storage and
//! up to O(n^3) work, so it is guarded by [`oracle_limit`].

use super::csr::CsrMatrix;

/// Dimension cap for dense O(n^3) checks. Defaults to 200; the environment
/// variable `PRECOND_LAB_ORACLE_LIMIT` overrides it.
pub fn oracle_limit() -> usize {
    std::env::var("PRECOND_LAB_ORACLE_LIMIT")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(200)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    values: Vec<f64>,
}

/// Outcome of the M-matrix test. A singular matrix is reported as
/// `is_m_matrix == false` with the `singular` flag set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MMatrixCheck {
    pub is_m_matrix: bool,
    pub singular: bool,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from row-major slices; all rows must have length n.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "row {i} has wrong length");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_csr(a: &CsrMatrix) -> Self {
        let mut m = Self::zeros(a.n());
        for (i, j, v) in a.triplets() {
            m.set(i, j, v);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.values[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn comparison_matrix(&self) -> DenseMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.get(i, j).abs();
                out.set(i, j, if i == j { a } else { -a });
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    /// `None` when a pivot falls below `n * eps * max|a_ij|` (singular).
    pub fn inverse(&self) -> Option<DenseMatrix> {
        let n = self.n;
        if n == 0 {
            return Some(self.clone());
        }
        let tol = self.max_norm() * f64::EPSILON * n as f64;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a.get(r, col).abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot_abs <= tol {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot_row, j));
                    a.set(col, j, y);
                    a.set(pivot_row, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let p = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - f * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
                }
            }
        }
        Some(inv)
    }

    /// M-matrix test: nonpositive off-diagonals, nonsingular, and an
    /// entrywise nonnegative inverse (up to `1e-12 * max|A^-1|` rounding).
    ///
    /// Panics when `n` exceeds [`oracle_limit`]; this is a dense O(n^3) check.
    pub fn is_m_matrix(&self) -> MMatrixCheck {
        let limit = oracle_limit();
        assert!(
            self.n <= limit,
            "is_m_matrix is a dense oracle limited to n <= {limit} (set PRECOND_LAB_ORACLE_LIMIT to raise)"
        );
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.get(i, j) > 0.0 {
                    return MMatrixCheck {
                        is_m_matrix: false,
                        singular: false,
                    };
                }
            }
        }
        let Some(inv) = self.inverse() else {
            return MMatrixCheck {
                is_m_matrix: false,
                singular: true,
            };
        };
        let eps = 1e-12 * inv.max_norm();
        let nonneg = inv.values.iter().all(|&v| v >= -eps);
        MMatrixCheck {
            is_m_matrix: nonneg,
            singular: false,
        }
    }

    /// H-matrix test: the comparison matrix must be an M-matrix.
    pub fn is_h_matrix(&self) -> MMatrixCheck {
        self.comparison_matrix().is_m_matrix()
    }
}
