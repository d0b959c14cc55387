use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use precond_cli::{
    run_experiment, run_tau_sweep, write_sweep_csv, PrecondKind, RhsSpec, RunConfig,
};
use precond_core::PivotMode;

/// Build an ILUFF or FFAPINV preconditioner for a sparse system and solve it
/// with right-preconditioned restarted GMRES.
#[derive(Parser, Debug)]
#[command(name = "precond-lab", version, about)]
struct Args {
    /// Matrix Market coordinate file (real, general or symmetric)
    #[arg(long)]
    matrix: PathBuf,

    /// Preconditioner to build
    #[arg(long, value_enum, default_value_t = PrecondArg::None)]
    precond: PrecondArg,

    /// Absolute drop tolerance; 0 gives the exact factorization
    #[arg(long, default_value_t = 0.1)]
    tau: f64,

    /// Pivot formula for ILUFF
    #[arg(long, value_enum, default_value_t = PivotArg::General)]
    pivot: PivotArg,

    /// GMRES restart length
    #[arg(long, default_value_t = 50)]
    restart: usize,

    /// Total inner-iteration cap
    #[arg(long = "max-iters", default_value_t = 10_000)]
    max_iters: usize,

    /// Relative residual target ||r_k|| / ||r_0||
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,

    /// Right-hand side: "ones" for b = A e, or a path to a vector file
    /// (one real per line)
    #[arg(long, default_value = "ones")]
    rhs: String,

    /// Optional permutation file applied as P A P^T before solving
    /// (line k holds the 1-based new position of old index k)
    #[arg(long)]
    perm: Option<PathBuf>,

    /// Write the JSON report here (CSV table in sweep mode)
    #[arg(long)]
    report: Option<PathBuf>,

    /// Write the residual history CSV here (single runs only)
    #[arg(long)]
    history: Option<PathBuf>,

    /// Run once per listed tolerance instead of a single experiment,
    /// emitting a combined CSV table
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecondArg {
    None,
    Iluff,
    Fapinv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PivotArg {
    General,
    Pd,
}

fn config_from(args: &Args) -> RunConfig {
    RunConfig {
        matrix_path: args.matrix.clone(),
        perm_path: args.perm.clone(),
        precond: match args.precond {
            PrecondArg::None => PrecondKind::None,
            PrecondArg::Iluff => PrecondKind::Iluff,
            PrecondArg::Fapinv => PrecondKind::Fapinv,
        },
        tau: args.tau,
        pivot: match args.pivot {
            PivotArg::General => PivotMode::General,
            PivotArg::Pd => PivotMode::PositiveDefinite,
        },
        restart: args.restart,
        max_iters: args.max_iters,
        rel_tol: args.tol,
        rhs: if args.rhs == "ones" {
            RhsSpec::OnesSolution
        } else {
            RhsSpec::File(PathBuf::from(&args.rhs))
        },
        report_path: args.report.clone(),
        history_path: args.history.clone(),
    }
}

fn emit_error(cfg: &RunConfig, msg: &str) {
    let payload = serde_json::json!({ "error": msg });
    println!("{payload}");
    if let Some(path) = &cfg.report_path {
        if let Ok(text) = serde_json::to_string_pretty(&payload) {
            let _ = std::fs::write(path, text + "\n");
        }
    }
    eprintln!("error: {msg}");
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = config_from(&args);

    match &args.sweep {
        None => match run_experiment(&cfg) {
            Ok(outcome) => {
                match serde_json::to_string_pretty(&outcome.report) {
                    Ok(text) => println!("{text}"),
                    Err(e) => {
                        emit_error(&cfg, &e.to_string());
                        return ExitCode::from(1);
                    }
                }
                if outcome.report.converged {
                    ExitCode::SUCCESS
                } else {
                    eprintln!("did not converge within {} iterations", cfg.max_iters);
                    ExitCode::from(2)
                }
            }
            Err(e) => {
                emit_error(&cfg, &e.to_string());
                ExitCode::from(1)
            }
        },
        Some(taus) => {
            if taus.is_empty() {
                emit_error(&cfg, "--sweep needs at least one tolerance");
                return ExitCode::from(1);
            }
            match run_tau_sweep(&cfg, taus) {
                Ok(rows) => {
                    let mut stdout = std::io::stdout().lock();
                    if write_sweep_csv(&rows, &mut stdout).is_err() {
                        return ExitCode::from(1);
                    }
                    if rows.iter().any(|r| r.result.is_err()) {
                        ExitCode::from(1)
                    } else if rows
                        .iter()
                        .any(|r| !r.result.as_ref().is_ok_and(|rep| rep.converged))
                    {
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    emit_error(&cfg, &e.to_string());
                    ExitCode::from(1)
                }
            }
        }
    }
}
