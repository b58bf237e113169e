//! Command-line front end.
//!
//! Subcommands:
//! * `emin <state.json>` — min-unextendible entanglement of a state file.
//! * `sweep` — CSV sweep over a state family.
//! * `verify` — run verification suites and emit a JSON report.
//! * `state` — write a bundled family state to a JSON state file.
//!
//! Exit codes: 0 success, 1 input error, 2 solver non-convergence (or a
//! failing verification suite). The environment variable
//! `UNEXT_LOG={quiet,info,debug}` controls solver logging on stderr.

mod formats;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use unext::emin::{emin_with, EminError};
use unext::sdp::{SdpStatus, SolveOptions, Verbosity};
use unext::states::{
    doubly_erased_private, erased_state, isotropic_state, max_entangled, private_state,
    werner_state, DensityOperator, PrivateStateSpec,
};
use unext::verify::{run_suite, SuiteConfig, SuiteId};

use formats::{read_state_file, write_state_file, SWEEP_HEADER};
use sweep::Family;

#[derive(Parser)]
#[command(
    name = "unext",
    about = "Bipartite state extendibility toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the min-unextendible entanglement of a state file.
    Emin {
        /// Path to a JSON state file.
        state: PathBuf,
        /// Solver tolerance (gap and feasibility).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sweep a state family over its parameter grid and write a CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// Local dimension (erased, werner, isotropic families).
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Key dimension (doubly-erased family).
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Number of evenly spaced grid points on [0, 1].
        #[arg(long, default_value_t = 11)]
        grid: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run verification suites; exit 0 iff every case passes.
    Verify {
        /// Comma-separated suite ids, or "all".
        #[arg(long, default_value = "all")]
        suites: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a bundled family state to a JSON state file.
    State {
        #[arg(long, value_enum)]
        family: StateFamily,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Family parameter (probability or fidelity).
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateFamily {
    Phi,
    Werner,
    Isotropic,
    Erased,
    DoublyErased,
    Private,
}

fn verbosity_from_env() -> Verbosity {
    match std::env::var("UNEXT_LOG").as_deref() {
        Ok("debug") => Verbosity::Debug,
        Ok("info") => Verbosity::Info,
        _ => Verbosity::Quiet,
    }
}

fn solver_options(tol: f64) -> SolveOptions {
    let mut opts = SolveOptions::with_tol(tol);
    opts.verbosity = verbosity_from_env();
    opts
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Emin { state, tol } => cmd_emin(&state, tol),
        Command::Sweep {
            family,
            d,
            k,
            grid,
            out,
        } => cmd_sweep(family, d, k, grid, &out),
        Command::Verify { suites, seed, out } => cmd_verify(&suites, seed, out.as_deref()),
        Command::State {
            family,
            d,
            k,
            p,
            out,
        } => cmd_state(family, d, k, p, &out),
    };
    ExitCode::from(code)
}

fn cmd_emin(path: &std::path::Path, tol: f64) -> u8 {
    let rho = match read_state_file(path) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let report = match emin_with(&rho, &solver_options(tol)) {
        Ok(r) => r,
        Err(e @ (EminError::DimensionCap { .. } | EminError::Domain { .. })) => {
            eprintln!("error: {e}");
            return 1;
        }
        Err(e) => {
            eprintln!("error: solver failed: {e}");
            return 2;
        }
    };
    let status = match report.solver_status {
        SdpStatus::Optimal => "optimal",
        SdpStatus::Infeasible => "infeasible",
        SdpStatus::MaxIters => "max_iters",
    };
    let doc = serde_json::json!({
        "emin_bits": report.value_bits,
        "overlap": report.overlap,
        "status": status,
    });
    println!("{doc}");
    if report.solver_status == SdpStatus::Optimal {
        0
    } else {
        2
    }
}

fn cmd_sweep(family: Family, d: usize, k: usize, grid: usize, out: &std::path::Path) -> u8 {
    let rows = match sweep::run_sweep(family, d, k, grid, solver_options(1e-8)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.downcast_ref::<EminError>().is_some() {
                2
            } else {
                1
            };
        }
    };
    match write_csv(out, &rows) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn write_csv(out: &std::path::Path, rows: &[formats::SweepRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(out)
        .with_context(|| format!("cannot open output path {}", out.display()))?;
    writer.write_record(SWEEP_HEADER)?;
    for row in rows {
        writer.write_record(row.to_record())?;
    }
    writer.flush()?;
    Ok(())
}

fn cmd_verify(suites: &str, seed: u64, out: Option<&std::path::Path>) -> u8 {
    let ids: Vec<SuiteId> = if suites.eq_ignore_ascii_case("all") {
        SuiteId::all().to_vec()
    } else {
        let mut ids = Vec::new();
        for token in suites.split(',') {
            match SuiteId::from_str(token.trim()) {
                Ok(id) => ids.push(id),
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
        }
        ids
    };
    let cfg = SuiteConfig {
        seed,
        solver: {
            let mut s = SolveOptions::default();
            s.verbosity = verbosity_from_env();
            s
        },
        ..SuiteConfig::default()
    };
    let reports = run_suite(&ids, &cfg);
    let mut all_pass = true;
    for report in &reports {
        for case in &report.cases {
            println!(
                "[{}] {} :: {} (measured={:.6e}, target={:.6e}, slack={:.3e})",
                if case.pass { "PASS" } else { "FAIL" },
                report.theorem_id,
                case.input,
                case.measured,
                case.target,
                case.slack
            );
        }
        println!(
            "[{}] {} — {}",
            if report.passed { "PASS" } else { "FAIL" },
            report.theorem_id,
            report.summary
        );
        all_pass &= report.passed;
    }
    if let Some(path) = out {
        match serde_json::to_string_pretty(&reports) {
            Ok(text) => {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write report {}: {e}", path.display());
                    return 1;
                }
            }
            Err(e) => {
                eprintln!("error: cannot serialize report: {e}");
                return 1;
            }
        }
    }
    if all_pass {
        0
    } else {
        2
    }
}

fn cmd_state(family: StateFamily, d: usize, k: usize, p: f64, out: &std::path::Path) -> u8 {
    let built: Result<DensityOperator> = (|| {
        let state = match family {
            StateFamily::Phi => max_entangled(d)?,
            StateFamily::Werner => werner_state(p, d)?,
            StateFamily::Isotropic => isotropic_state(p, d)?,
            StateFamily::Erased => erased_state(p, d)?,
            StateFamily::DoublyErased => doubly_erased_private(&max_entangled(k)?, p)?,
            StateFamily::Private => {
                let spec = PrivateStateSpec::with_defaults(k, (2, 2))?;
                private_state(&spec)?
            }
        };
        Ok(state)
    })();
    match built.and_then(|rho| write_state_file(out, &rho)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
