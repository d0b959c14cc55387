//! Deterministic random test-matrix generators.
//!
//! All generators build strictly row diagonally dominant matrices, which
//! pins down the class membership needed by the property suites:
//! a dominant matrix with positive diagonal and nonpositive off-diagonals is
//! an M-matrix, any dominant matrix with nonzero diagonal is an H-matrix,
//! and a symmetric dominant matrix with positive diagonal is SPD. The
//! `gap` argument is the absolute dominance margin `|a_ii| - sum |a_ij|`,
//! which bounds the condition number via [`varah_condition_bound`].

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;

use crate::sparse::CsrMatrix;

const MAG_LO: f64 = 0.1;
const MAG_HI: f64 = 1.0;

fn off_diagonal_count(n: usize, density: f64) -> usize {
    let k = (density * n as f64).round() as usize;
    k.min(n.saturating_sub(1))
}

/// Distinct off-diagonal column picks for row `i`.
fn pick_columns(n: usize, i: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    sample(rng, n - 1, k)
        .into_iter()
        .map(|c| if c >= i { c + 1 } else { c })
        .collect()
}

/// Sparse M-matrix: nonpositive off-diagonals, each row strictly dominant
/// by `gap`.
pub fn random_m_matrix(n: usize, density: f64, gap: f64, rng: &mut impl Rng) -> CsrMatrix {
    assert!(n >= 1 && gap > 0.0);
    let k = off_diagonal_count(n, density);
    let mut triplets = Vec::with_capacity(n * (k + 1));
    for i in 0..n {
        let mut offsum = 0.0;
        for j in pick_columns(n, i, k, rng) {
            let mag = rng.gen_range(MAG_LO..MAG_HI);
            offsum += mag;
            triplets.push((i, j, -mag));
        }
        triplets.push((i, i, offsum + gap));
    }
    CsrMatrix::from_triplets(n, &triplets).expect("generated triplets are in range")
}

/// Sparse H-matrix: an M-matrix pattern with random sign flips on both the
/// off-diagonals and the diagonal.
pub fn random_h_matrix(n: usize, density: f64, gap: f64, rng: &mut impl Rng) -> CsrMatrix {
    assert!(n >= 1 && gap > 0.0);
    let k = off_diagonal_count(n, density);
    let mut triplets = Vec::with_capacity(n * (k + 1));
    for i in 0..n {
        let mut offsum = 0.0;
        for j in pick_columns(n, i, k, rng) {
            let mag = rng.gen_range(MAG_LO..MAG_HI);
            offsum += mag;
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            triplets.push((i, j, sign * mag));
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        triplets.push((i, i, sign * (offsum + gap)));
    }
    CsrMatrix::from_triplets(n, &triplets).expect("generated triplets are in range")
}

/// Sparse SPD matrix: symmetric pattern, strictly dominant positive diagonal.
pub fn random_spd_matrix(n: usize, density: f64, gap: f64, rng: &mut impl Rng) -> CsrMatrix {
    assert!(n >= 1 && gap > 0.0);
    let k = off_diagonal_count(n, density);
    let mut upper: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in pick_columns(n, i, k, rng) {
            if j > i {
                let mag = rng.gen_range(MAG_LO..MAG_HI);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                upper.push((i, j, sign * mag));
            }
        }
    }
    let mut offsum = vec![0.0; n];
    let mut triplets = Vec::with_capacity(2 * upper.len() + n);
    for &(i, j, v) in &upper {
        offsum[i] += v.abs();
        offsum[j] += v.abs();
        triplets.push((i, j, v));
        triplets.push((j, i, v));
    }
    for (i, s) in offsum.iter().enumerate() {
        triplets.push((i, i, s + gap));
    }
    CsrMatrix::from_triplets(n, &triplets).expect("generated triplets are in range")
}

/// Nonsymmetric positive definite matrix `A = B + sI`, with the shift chosen
/// so the symmetric part `(A + A^T)/2` is strictly dominant (hence SPD).
pub fn random_positive_definite(n: usize, density: f64, gap: f64, rng: &mut impl Rng) -> CsrMatrix {
    assert!(n >= 1 && gap > 0.0);
    let k = off_diagonal_count(n, density);
    let mut b: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in pick_columns(n, i, k, rng) {
            let mag = rng.gen_range(MAG_LO..MAG_HI);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            b.push((i, j, sign * mag));
        }
    }
    // Row sums of |(B + B^T)/2| off the diagonal.
    let mut sym: HashMap<(usize, usize), f64> = HashMap::new();
    for &(i, j, v) in &b {
        let key = (i.min(j), i.max(j));
        *sym.entry(key).or_insert(0.0) += v / 2.0;
    }
    let mut hoffsum = vec![0.0; n];
    for (&(i, j), &h) in &sym {
        hoffsum[i] += h.abs();
        hoffsum[j] += h.abs();
    }
    // B has a zero diagonal by construction, so s = max hoffsum + gap.
    let shift = hoffsum.iter().fold(0.0f64, |m, v| m.max(*v)) + gap;
    let mut triplets = b;
    for i in 0..n {
        triplets.push((i, i, shift));
    }
    CsrMatrix::from_triplets(n, &triplets).expect("generated triplets are in range")
}

/// Five-point Laplacian on an nx-by-ny grid with Dirichlet boundary:
/// a structured SPD M-matrix, handy as a non-random instance.
pub fn grid_laplacian(nx: usize, ny: usize) -> CsrMatrix {
    let n = nx * ny;
    let at = |ix: usize, iy: usize| iy * nx + ix;
    let mut triplets = Vec::with_capacity(5 * n);
    for iy in 0..ny {
        for ix in 0..nx {
            let row = at(ix, iy);
            triplets.push((row, row, 4.0));
            if ix > 0 {
                triplets.push((row, at(ix - 1, iy), -1.0));
            }
            if ix + 1 < nx {
                triplets.push((row, at(ix + 1, iy), -1.0));
            }
            if iy > 0 {
                triplets.push((row, at(ix, iy - 1), -1.0));
            }
            if iy + 1 < ny {
                triplets.push((row, at(ix, iy + 1), -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, &triplets).expect("grid triplets are in range")
}

/// Ahlberg-Nilson-Varah bound on the infinity-norm condition number of a
/// strictly row diagonally dominant matrix:
/// `cond(A) <= ||A||_inf / min_i (|a_ii| - sum_{j != i} |a_ij|)`.
/// Returns `None` when the matrix is not strictly dominant.
pub fn varah_condition_bound(a: &CsrMatrix) -> Option<f64> {
    let mut min_gap = f64::INFINITY;
    let mut norm_inf = 0.0f64;
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        let mut diag = 0.0;
        let mut offsum = 0.0;
        let mut total = 0.0;
        for (&j, &v) in cols.iter().zip(vals.iter()) {
            total += v.abs();
            if j == i {
                diag = v.abs();
            } else {
                offsum += v.abs();
            }
        }
        let gap = diag - offsum;
        if gap <= 0.0 {
            return None;
        }
        min_gap = min_gap.min(gap);
        norm_inf = norm_inf.max(total);
    }
    Some(norm_inf / min_gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> impl Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn m_matrix_generator_is_m() {
        let a = random_m_matrix(40, 0.15, 1.0, &mut rng(7));
        let check = crate::sparse::DenseMatrix::from_csr(&a).is_m_matrix();
        assert!(check.is_m_matrix);
        assert!(varah_condition_bound(&a).unwrap() < 1e4);
    }

    #[test]
    fn h_matrix_generator_is_h() {
        let a = random_h_matrix(40, 0.15, 1.0, &mut rng(8));
        assert!(
            crate::sparse::DenseMatrix::from_csr(&a)
                .is_h_matrix()
                .is_m_matrix
        );
    }

    #[test]
    fn spd_generator_is_symmetric_dominant() {
        let a = random_spd_matrix(30, 0.2, 0.5, &mut rng(9));
        for (i, j, v) in a.triplets() {
            assert_eq!(a.get(j, i), v, "asymmetry at ({i},{j})");
        }
        assert!(varah_condition_bound(&a).is_some());
    }

    #[test]
    fn positive_definite_generator_has_pd_symmetric_part() {
        let a = random_positive_definite(30, 0.2, 0.5, &mut rng(10));
        let d = crate::sparse::DenseMatrix::from_csr(&a);
        // x^T A x > 0 for a few random directions
        let mut r = rng(11);
        for _ in 0..10 {
            let x: Vec<f64> = (0..30).map(|_| r.gen_range(-1.0..1.0)).collect();
            let ax = d.matvec(&x);
            let q: f64 = x.iter().zip(ax.iter()).map(|(a, b)| a * b).sum();
            assert!(q > 0.0);
        }
    }

    #[test]
    fn laplacian_shape() {
        let a = grid_laplacian(3, 3);
        assert_eq!(a.n(), 9);
        assert_eq!(a.get(4, 4), 4.0);
        assert_eq!(a.get(4, 3), -1.0);
        assert_eq!(a.get(0, 8), 0.0);
    }
}
