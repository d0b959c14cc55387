//! Experiment pipeline behind the `precond-lab` binary: read a matrix,
//! optionally permute it, form the right-hand side, build a preconditioner,
//! run restarted GMRES and emit a JSON report plus a CSV residual history.
//! Timings are wall-clock, reported at millisecond resolution; `Ttime` is
//! always the exact f64 sum of `Ptime` and `It-Time`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use precond_core::{
    apply_permutation, ffinv_vector, gmres_right, iluff_factorize, make_rhs_ones_solution,
    read_matrix_market, read_permutation, read_vector, write_residual_history, ColumnCursorIndex,
    CsrMatrix, DropRule, GmresConfig, PivotMode, Preconditioner,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecondKind {
    None,
    Iluff,
    Fapinv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsSpec {
    /// b = A e, the all-ones exact solution protocol.
    OnesSolution,
    /// One real per line, n lines.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub matrix_path: PathBuf,
    pub perm_path: Option<PathBuf>,
    pub precond: PrecondKind,
    pub tau: f64,
    pub pivot: PivotMode,
    pub restart: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub rhs: RhsSpec,
    pub report_path: Option<PathBuf>,
    pub history_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(matrix_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            matrix_path: matrix_path.into(),
            perm_path: None,
            precond: PrecondKind::None,
            tau: 0.1,
            pivot: PivotMode::General,
            restart: 50,
            max_iters: 10_000,
            rel_tol: 1e-10,
            rhs: RhsSpec::OnesSolution,
            report_path: None,
            history_path: None,
        }
    }
}

/// Per-run report, serialized as the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub matrix: String,
    pub n: usize,
    pub nnz: usize,
    pub tau: f64,
    pub density: Option<f64>,
    #[serde(rename = "Ptime")]
    pub ptime: f64,
    #[serde(rename = "It-Time")]
    pub it_time: f64,
    #[serde(rename = "Ttime")]
    pub ttime: f64,
    #[serde(rename = "Its")]
    pub its: usize,
    pub converged: bool,
    pub breakdowns: usize,
}

/// Everything a single run produced; the report is what gets serialized.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ExperimentReport,
    pub history: Vec<f64>,
    pub solution: Vec<f64>,
}

pub type RunError = Box<dyn std::error::Error>;
pub type RunResult<T> = Result<T, RunError>;

fn round_ms(seconds: f64) -> f64 {
    (seconds * 1000.0).round() / 1000.0
}

/// Loaded problem shared across the runs of a sweep.
pub struct Pipeline {
    matrix_label: String,
    a: CsrMatrix,
    cols: ColumnCursorIndex,
    b: Vec<f64>,
}

impl Pipeline {
    /// Reads and permutes the matrix, then forms b. The permutation is
    /// applied before building `b = A e`, so the reported system is the
    /// permuted one.
    pub fn load(cfg: &RunConfig) -> RunResult<Self> {
        let mut a = read_matrix_market(&cfg.matrix_path)?;
        if let Some(perm_path) = &cfg.perm_path {
            let p = read_permutation(perm_path, a.n())?;
            a = apply_permutation(&a, &p)?;
        }
        let b = match &cfg.rhs {
            RhsSpec::OnesSolution => make_rhs_ones_solution(&a),
            RhsSpec::File(path) => read_vector(path, a.n())?,
        };
        let cols = ColumnCursorIndex::build(&a);
        Ok(Pipeline {
            matrix_label: cfg.matrix_path.display().to_string(),
            a,
            cols,
            b,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }

    /// Builds the preconditioner (timed), solves (timed) and assembles the
    /// report for one tolerance.
    pub fn run(&self, cfg: &RunConfig, tau: f64) -> RunResult<RunOutcome> {
        let rule = DropRule::new(tau)?;

        let build_started = Instant::now();
        let (precond, density) = match cfg.precond {
            PrecondKind::None => (Preconditioner::None, None),
            PrecondKind::Iluff => {
                let f = iluff_factorize(&self.a, &self.cols, &rule, cfg.pivot)?;
                let density = f.density(&self.a);
                (Preconditioner::Iluff(f), Some(density))
            }
            PrecondKind::Fapinv => {
                let f = ffinv_vector(&self.a, &self.cols, &rule)?;
                (Preconditioner::Fapinv(f), None)
            }
        };
        let ptime = round_ms(build_started.elapsed().as_secs_f64());

        let gmres_cfg = GmresConfig {
            restart: cfg.restart,
            max_iters: cfg.max_iters,
            rel_tol: cfg.rel_tol,
        };
        let (solution, solve) = gmres_right(&self.a, &self.b, &precond, &gmres_cfg)?;
        let it_time = round_ms(solve.solve_seconds);

        let report = ExperimentReport {
            matrix: self.matrix_label.clone(),
            n: self.a.n(),
            nnz: self.a.nnz(),
            tau,
            density,
            ptime,
            it_time,
            ttime: ptime + it_time,
            its: solve.iterations,
            converged: solve.converged,
            breakdowns: precond.breakdown_count(),
        };
        Ok(RunOutcome {
            report,
            history: solve.residual_history,
            solution,
        })
    }
}

fn write_report_json(report: &ExperimentReport, path: &Path) -> RunResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

fn write_history_csv(history: &[f64], path: &Path) -> RunResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_residual_history(&mut w, history)?;
    Ok(())
}

/// Full single-run protocol, writing the JSON report and CSV history when
/// paths are configured.
pub fn run_experiment(cfg: &RunConfig) -> RunResult<RunOutcome> {
    let pipeline = Pipeline::load(cfg)?;
    let outcome = pipeline.run(cfg, cfg.tau)?;
    if let Some(path) = &cfg.report_path {
        write_report_json(&outcome.report, path)?;
    }
    if let Some(path) = &cfg.history_path {
        write_history_csv(&outcome.history, path)?;
    }
    Ok(outcome)
}

/// One sweep row; failed runs carry the error text and the sweep continues.
#[derive(Debug)]
pub struct SweepRow {
    pub tau: f64,
    pub result: Result<ExperimentReport, String>,
}

/// Runs one experiment per tolerance over a single matrix load and writes
/// the combined CSV table to `report_path` when set. The per-run history
/// output does not apply to sweeps.
pub fn run_tau_sweep(cfg: &RunConfig, taus: &[f64]) -> RunResult<Vec<SweepRow>> {
    let pipeline = Pipeline::load(cfg)?;
    let rows: Vec<SweepRow> = taus
        .iter()
        .map(|&tau| SweepRow {
            tau,
            result: pipeline
                .run(cfg, tau)
                .map(|o| o.report)
                .map_err(|e| e.to_string()),
        })
        .collect();
    if let Some(path) = &cfg.report_path {
        let mut w = BufWriter::new(File::create(path)?);
        write_sweep_csv(&rows, &mut w)?;
    }
    Ok(rows)
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Table mirroring the per-tolerance benchmark columns.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: &mut W) -> std::io::Result<()> {
    writeln!(
        w,
        "tau,density,Ptime,It-Time,Ttime,Its,converged,breakdowns,error"
    )?;
    for row in rows {
        match &row.result {
            Ok(r) => {
                let density = r.density.map(|d| d.to_string()).unwrap_or_default();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},",
                    row.tau, density, r.ptime, r.it_time, r.ttime, r.its, r.converged, r.breakdowns
                )?;
            }
            Err(msg) => writeln!(w, "{},,,,,,,,{}", row.tau, csv_escape(msg))?,
        }
    }
    Ok(())
}
