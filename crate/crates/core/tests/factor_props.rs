//! Numerical properties of the inverse factors and the incomplete LDU:
//! exactness at zero tolerance, vector/scalar route agreement, the
//! M-/H-matrix existence theorems and the inverse-relation between the two
//! factorizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use precond_core::matgen::{random_h_matrix, random_m_matrix, random_positive_definite};
use precond_core::{
    ffinv_scalar, ffinv_vector, iluff_factorize, read_matrix_market, read_vector,
    write_matrix_market, write_vector, ColumnCursorIndex, CsrMatrix, DenseMatrix, DropRule,
    InverseFactors, PivotMode,
};

fn ffinv(a: &CsrMatrix, tau: f64) -> InverseFactors {
    let cols = ColumnCursorIndex::build(a);
    ffinv_vector(a, &cols, &DropRule::new(tau).unwrap()).unwrap()
}

fn dense_diag(d: &[f64]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(d.len());
    for (i, &v) in d.iter().enumerate() {
        m.set(i, i, v);
    }
    m
}

fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let n = a.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
        }
    }
    worst
}

/// ||W A Z - D^-1||_max relative to ||A||_max.
fn waz_residual(a: &CsrMatrix, f: &InverseFactors) -> f64 {
    let wd = f.w().to_dense_unit_lower();
    let zd = f.z().to_dense_unit_upper();
    let ad = DenseMatrix::from_csr(a);
    let waz = wd.matmul(&ad).matmul(&zd);
    let dinv: Vec<f64> = f.d().iter().map(|v| 1.0 / v).collect();
    max_abs_diff(&waz, &dense_diag(&dinv)) / a.max_abs()
}

#[test]
fn exactness_at_tau_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..10 {
        let n = rng.gen_range(5..=100);
        let density = rng.gen_range(0.05..0.3);
        let a = random_h_matrix(n, density, 1.0, &mut rng);
        let f = ffinv(&a, 0.0);
        assert_eq!(f.breakdown_count(), 0);
        let res = waz_residual(&a, &f);
        assert!(res <= 1e-10, "n = {n}: relative residual {res}");
    }
}

fn assert_factors_close(x: &InverseFactors, y: &InverseFactors, reltol: f64) {
    assert_eq!(x.n(), y.n());
    for (a, b) in x.d().iter().zip(y.d().iter()) {
        if a != b {
            assert!((a - b).abs() <= reltol * a.abs().max(b.abs()), "{a} vs {b}");
        }
    }
    let (wx, wy) = (x.w().to_dense_unit_lower(), y.w().to_dense_unit_lower());
    let (zx, zy) = (x.z().to_dense_unit_upper(), y.z().to_dense_unit_upper());
    for (p, q) in [(wx, wy), (zx, zy)] {
        for i in 0..x.n() {
            for j in 0..x.n() {
                let (a, b) = (p.get(i, j), q.get(i, j));
                if a != b {
                    assert!(
                        (a - b).abs() <= reltol * a.abs().max(b.abs()),
                        "entry ({i},{j}): {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn vector_and_scalar_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for _ in 0..6 {
        let n = rng.gen_range(5..=40);
        let a = random_h_matrix(n, 0.2, 1.0, &mut rng);
        let cols = ColumnCursorIndex::build(&a);
        for tau in [0.0, 0.05, 0.1] {
            let rule = DropRule::new(tau).unwrap();
            let fv = ffinv_vector(&a, &cols, &rule).unwrap();
            let (fs, _) = ffinv_scalar(&a, &cols, &rule, false).unwrap();
            assert_factors_close(&fv, &fs, 1e-12);
        }
    }
}

#[test]
fn unit_triangular_structure_for_every_tau() {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    for tau in [0.0, 0.01, 0.1, 0.7] {
        let a = random_h_matrix(30, 0.2, 0.5, &mut rng);
        let f = ffinv(&a, tau);
        // strict triangles by construction of the storage: every stored
        // index lies below its lane
        for (lane, idx, _) in f.w().entries() {
            assert!(idx < lane);
        }
        for (lane, idx, _) in f.z().entries() {
            assert!(idx < lane);
        }
        assert!(f.d().iter().all(|v| v.is_finite() && *v != 0.0));
    }
}

/// Elementwise x >= y - slack over the dense expansions.
fn dominates(x: &DenseMatrix, y: &DenseMatrix, slack: f64) -> bool {
    let n = x.n();
    (0..n).all(|i| (0..n).all(|j| x.get(i, j) >= y.get(i, j) - slack))
}

#[test]
fn theorem_dropped_m_matrix_factors_are_dominated() {
    // For M-matrices: W >= W_hat >= 0, Z >= Z_hat >= 0 and
    // 1/d_j >= 1/d_hat_j > 0, where the hatted factors use tau > 0.
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let a = random_m_matrix(30, 0.2, 0.5, &mut rng);
    assert!(DenseMatrix::from_csr(&a).is_m_matrix().is_m_matrix);
    let exact = ffinv(&a, 0.0);
    let dropped = ffinv(&a, 0.1);
    assert_eq!(exact.breakdown_count() + dropped.breakdown_count(), 0);

    let w = exact.w().to_dense_unit_lower();
    let w_hat = dropped.w().to_dense_unit_lower();
    let z = exact.z().to_dense_unit_upper();
    let z_hat = dropped.z().to_dense_unit_upper();
    let slack = 1e-12 * w.max_norm().max(z.max_norm()).max(1.0);
    assert!(dominates(&w, &w_hat, slack));
    assert!(dominates(&w_hat, &DenseMatrix::zeros(30), slack));
    assert!(dominates(&z, &z_hat, slack));
    assert!(dominates(&z_hat, &DenseMatrix::zeros(30), slack));
    // Dropping removes nonnegative corrections multiplied by nonpositive
    // off-diagonals, so the dropped pivots dominate: 1/d_hat_j >= 1/d_j > 0.
    for (d, d_hat) in exact.d().iter().zip(dropped.d().iter()) {
        let (p, p_hat) = (1.0 / d, 1.0 / d_hat);
        assert!(p > 0.0);
        assert!(p_hat >= p - 1e-12 * p_hat.abs().max(1.0));
    }
}

#[test]
fn theorem_h_matrix_pivots_dominate_comparison() {
    // |1/d_j(A)| >= 1/d_j(A_hat) > 0 at the same tolerance, tau = 0 and 0.1.
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for _ in 0..5 {
        let n = rng.gen_range(10..=40);
        let a = random_h_matrix(n, 0.2, 0.5, &mut rng);
        let comp = a.comparison_matrix();
        for tau in [0.0, 0.1] {
            let fa = ffinv(&a, tau);
            let fc = ffinv(&comp, tau);
            assert_eq!(fa.breakdown_count() + fc.breakdown_count(), 0);
            for j in 0..n {
                let pa = (1.0 / fa.d()[j]).abs();
                let pc = 1.0 / fc.d()[j];
                assert!(pc > 0.0, "comparison pivot {j} not positive");
                assert!(pa >= pc - 1e-12 * pa.max(1.0), "pivot {j}: |{pa}| < {pc}");
            }
        }
    }
}

#[test]
fn corollary_pivot_signs_match_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    for tau in [0.0, 0.1] {
        let a = random_h_matrix(50, 0.15, 0.5, &mut rng);
        let f = ffinv(&a, tau);
        for j in 0..50 {
            assert_eq!(
                f.d()[j].signum(),
                a.get(j, j).signum(),
                "column {j} at tau {tau}"
            );
        }
    }
}

#[test]
fn apply_factored_inverse_recovers_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let a = random_h_matrix(10, 0.3, 1.0, &mut rng);
    let f = ffinv(&a, 0.0);
    let b = a.matvec(&[1.0; 10]);
    let x = f.apply(&b).unwrap();
    for xi in x {
        assert!((xi - 1.0).abs() <= 1e-10);
    }
}

// ---- ILUFF ----

/// ||L D^-1 U - A||_max relative to ||A||_max.
fn ldu_residual(a: &CsrMatrix, f: &precond_core::IlduFactors) -> f64 {
    let ld = f.l().to_dense_unit_lower();
    let ud = f.u().to_dense_unit_upper();
    let dinv: Vec<f64> = f.d().iter().map(|v| 1.0 / v).collect();
    let prod = ld.matmul(&dense_diag(&dinv)).matmul(&ud);
    max_abs_diff(&prod, &DenseMatrix::from_csr(a)) / a.max_abs()
}

#[test]
fn iluff_exactness_at_tau_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    for _ in 0..10 {
        let n = rng.gen_range(5..=100);
        let a = random_h_matrix(n, rng.gen_range(0.05..0.3), 1.0, &mut rng);
        let cols = ColumnCursorIndex::build(&a);
        let f = iluff_factorize(&a, &cols, &DropRule::exact(), PivotMode::General).unwrap();
        assert_eq!(f.breakdown_count(), 0);
        let res = ldu_residual(&a, &f);
        assert!(res <= 1e-10, "n = {n}: relative residual {res}");
    }
}

#[test]
fn inverse_relation_between_factorizations() {
    // At tau = 0 the direct and inverse factors invert each other:
    // L W = I and Z U = I.
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    for _ in 0..5 {
        let n = rng.gen_range(5..=60);
        let a = random_h_matrix(n, 0.2, 1.0, &mut rng);
        let cols = ColumnCursorIndex::build(&a);
        let inv = ffinv_vector(&a, &cols, &DropRule::exact()).unwrap();
        let ldu = iluff_factorize(&a, &cols, &DropRule::exact(), PivotMode::General).unwrap();
        let lw = ldu
            .l()
            .to_dense_unit_lower()
            .matmul(&inv.w().to_dense_unit_lower());
        let zu = inv
            .z()
            .to_dense_unit_upper()
            .matmul(&ldu.u().to_dense_unit_upper());
        let tol = 1e-10 * n as f64;
        assert!(max_abs_diff(&lw, &DenseMatrix::identity(n)) <= tol);
        assert!(max_abs_diff(&zu, &DenseMatrix::identity(n)) <= tol);
    }
}

#[test]
fn iluff_h_matrix_pivots_are_safe() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let a = random_h_matrix(60, 0.1, 0.5, &mut rng);
    let cols = ColumnCursorIndex::build(&a);
    for tau in [0.0, 0.05, 0.1, 0.5] {
        let f =
            iluff_factorize(&a, &cols, &DropRule::new(tau).unwrap(), PivotMode::General).unwrap();
        assert_eq!(f.breakdown_count(), 0, "tau {tau}");
        for j in 0..60 {
            assert_eq!(
                f.d()[j].signum(),
                a.get(j, j).signum(),
                "tau {tau}, col {j}"
            );
        }
    }
}

#[test]
fn iluff_pd_mode_is_breakdown_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    for _ in 0..5 {
        let n = rng.gen_range(10..=60);
        let a = random_positive_definite(n, 0.15, 0.5, &mut rng);
        let cols = ColumnCursorIndex::build(&a);
        for tau in [0.0, 0.1, 0.5] {
            let f = iluff_factorize(
                &a,
                &cols,
                &DropRule::new(tau).unwrap(),
                PivotMode::PositiveDefinite,
            )
            .unwrap();
            assert_eq!(f.breakdown_count(), 0);
            assert!(f.d().iter().all(|&d| d > 0.0));
        }
    }
}

#[test]
fn iluff_apply_inverts_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(1200);
    let a = random_h_matrix(20, 0.25, 1.0, &mut rng);
    let cols = ColumnCursorIndex::build(&a);
    let f = iluff_factorize(&a, &cols, &DropRule::exact(), PivotMode::General).unwrap();
    for _ in 0..5 {
        let x: Vec<f64> = (0..20).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let out = f.apply(&a.matvec(&x)).unwrap();
        for (got, want) in out.iter().zip(x.iter()) {
            assert!((got - want).abs() <= 1e-10);
        }
    }
}

#[test]
fn factors_serialize_to_matrix_market_and_diag_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1300);
    let a = random_h_matrix(15, 0.3, 1.0, &mut rng);
    let f = ffinv(&a, 0.05);

    let w_path = dir.path().join("w.mtx");
    let z_path = dir.path().join("z.mtx");
    let d_path = dir.path().join("d.txt");
    write_matrix_market(&f.w_matrix(), &w_path).unwrap();
    write_matrix_market(&f.z_matrix(), &z_path).unwrap();
    write_vector(f.d(), &d_path).unwrap();

    assert_eq!(read_matrix_market(&w_path).unwrap(), f.w_matrix());
    assert_eq!(read_matrix_market(&z_path).unwrap(), f.z_matrix());
    assert_eq!(read_vector(&d_path, 15).unwrap(), f.d());

    // same interface for the direct factors
    let cols = ColumnCursorIndex::build(&a);
    let g = iluff_factorize(&a, &cols, &DropRule::new(0.05).unwrap(), PivotMode::General).unwrap();
    let l_path = dir.path().join("l.mtx");
    write_matrix_market(&g.l_matrix(), &l_path).unwrap();
    assert_eq!(read_matrix_market(&l_path).unwrap(), g.l_matrix());
    assert_eq!(g.u_matrix().get(0, 0), 1.0);
}
