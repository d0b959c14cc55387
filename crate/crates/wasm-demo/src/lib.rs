//! Browser bindings for the preconditioning lab. Three operations are
//! exported: generating a test matrix as Matrix Market text, inspecting a
//! preconditioner's fill at a given drop tolerance, and solving with
//! GMRES(m) to obtain the residual history for plotting. All payloads are
//! JSON strings so the page needs no typed glue.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

use precond_core::matgen::{
    grid_laplacian, random_h_matrix, random_m_matrix, random_positive_definite, random_spd_matrix,
};
use precond_core::{
    ffinv_vector, gmres_right, iluff_factorize, make_rhs_ones_solution, matrix_market_string,
    read_matrix_market_str, ColumnCursorIndex, CsrMatrix, DropRule, GmresConfig, PivotMode,
    Preconditioner,
};

fn load(matrix_mm: &str) -> Result<CsrMatrix, String> {
    read_matrix_market_str(matrix_mm).map_err(|e| e.to_string())
}

fn build_preconditioner(
    a: &CsrMatrix,
    kind: &str,
    tau: f64,
    pivot: &str,
) -> Result<(Preconditioner, Option<f64>), String> {
    let cols = ColumnCursorIndex::build(a);
    let rule = DropRule::new(tau).map_err(|e| e.to_string())?;
    let mode = match pivot {
        "pd" => PivotMode::PositiveDefinite,
        _ => PivotMode::General,
    };
    match kind {
        "none" => Ok((Preconditioner::None, None)),
        "iluff" => {
            let f = iluff_factorize(a, &cols, &rule, mode).map_err(|e| e.to_string())?;
            let density = f.density(a);
            Ok((Preconditioner::Iluff(f), Some(density)))
        }
        "fapinv" => {
            let f = ffinv_vector(a, &cols, &rule).map_err(|e| e.to_string())?;
            Ok((Preconditioner::Fapinv(f), None))
        }
        other => Err(format!("unknown preconditioner '{other}'")),
    }
}

fn generate_matrix_impl(kind: &str, n: usize, density: f64, seed: u64) -> Result<String, String> {
    if n == 0 || n > 2000 {
        return Err("dimension must be between 1 and 2000".into());
    }
    if !(0.0..=1.0).contains(&density) {
        return Err("density must lie in [0, 1]".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = match kind {
        "m-matrix" => random_m_matrix(n, density, 0.2, &mut rng),
        "h-matrix" => random_h_matrix(n, density, 0.2, &mut rng),
        "spd" => random_spd_matrix(n, density, 0.2, &mut rng),
        "positive-definite" => random_positive_definite(n, density, 0.2, &mut rng),
        "laplacian" => {
            let side = (n as f64).sqrt().round().max(2.0) as usize;
            grid_laplacian(side, side)
        }
        other => Err(format!("unknown matrix kind '{other}'"))?,
    };
    Ok(matrix_market_string(&a))
}

fn preconditioner_stats_impl(
    matrix_mm: &str,
    kind: &str,
    tau: f64,
    pivot: &str,
) -> Result<String, String> {
    let a = load(matrix_mm)?;
    let cols = ColumnCursorIndex::build(&a);
    let rule = DropRule::new(tau).map_err(|e| e.to_string())?;
    let payload = match kind {
        "iluff" => {
            let mode = if pivot == "pd" {
                PivotMode::PositiveDefinite
            } else {
                PivotMode::General
            };
            let f = iluff_factorize(&a, &cols, &rule, mode).map_err(|e| e.to_string())?;
            json!({
                "variant": "iluff",
                "n": a.n(),
                "nnz": a.nnz(),
                "tau": tau,
                "nnz_l": f.l().nnz(),
                "nnz_u": f.u().nnz() + a.n(),
                "density": f.density(&a),
                "breakdowns": f.breakdown_count(),
            })
        }
        "fapinv" => {
            let f = ffinv_vector(&a, &cols, &rule).map_err(|e| e.to_string())?;
            json!({
                "variant": "fapinv",
                "n": a.n(),
                "nnz": a.nnz(),
                "tau": tau,
                "nnz_w": f.w().nnz() + a.n(),
                "nnz_z": f.z().nnz() + a.n(),
                "breakdowns": f.breakdown_count(),
            })
        }
        "none" => return Err("pick iluff or fapinv to inspect factor fill".into()),
        other => return Err(format!("unknown preconditioner '{other}'")),
    };
    Ok(payload.to_string())
}

fn solve_history_impl(
    matrix_mm: &str,
    precond: &str,
    tau: f64,
    pivot: &str,
    restart: usize,
    rel_tol: f64,
    max_iters: usize,
) -> Result<String, String> {
    let a = load(matrix_mm)?;
    let (op, density) = build_preconditioner(&a, precond, tau, pivot)?;
    let b = make_rhs_ones_solution(&a);
    let cfg = GmresConfig {
        restart,
        max_iters,
        rel_tol,
    };
    let (x, report) = gmres_right(&a, &b, &op, &cfg).map_err(|e| e.to_string())?;
    let err_vs_ones = x.iter().map(|xi| (xi - 1.0).abs()).fold(0.0f64, f64::max);
    Ok(json!({
        "n": a.n(),
        "nnz": a.nnz(),
        "precond": precond,
        "tau": tau,
        "converged": report.converged,
        "its": report.iterations,
        "density": density,
        "breakdowns": report.breakdown_count,
        "max_error_vs_ones": err_vs_ones,
        "history": report.residual_history,
    })
    .to_string())
}

/// Builds a test matrix (`m-matrix`, `h-matrix`, `spd`,
/// `positive-definite` or `laplacian`) and returns it as Matrix Market
/// coordinate text.
#[wasm_bindgen]
pub fn generate_matrix(kind: &str, n: usize, density: f64, seed: u64) -> Result<String, JsValue> {
    generate_matrix_impl(kind, n, density, seed).map_err(|e| JsValue::from_str(&e))
}

/// Factorizes the given Matrix Market text with ILUFF or FFAPINV and
/// reports fill statistics as JSON.
#[wasm_bindgen]
pub fn preconditioner_stats(
    matrix_mm: &str,
    kind: &str,
    tau: f64,
    pivot: &str,
) -> Result<String, JsValue> {
    preconditioner_stats_impl(matrix_mm, kind, tau, pivot).map_err(|e| JsValue::from_str(&e))
}

/// Solves `A x = A e` with right-preconditioned GMRES and returns the
/// residual history plus convergence data as JSON.
#[wasm_bindgen]
pub fn solve_history(
    matrix_mm: &str,
    precond: &str,
    tau: f64,
    pivot: &str,
    restart: usize,
    rel_tol: f64,
    max_iters: usize,
) -> Result<String, JsValue> {
    solve_history_impl(matrix_mm, precond, tau, pivot, restart, rel_tol, max_iters)
        .map_err(|e| JsValue::from_str(&e))
}
