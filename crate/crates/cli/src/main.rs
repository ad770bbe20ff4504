//! `oar`: batch driver for the operator-algebraic renormalization engine.
//!
//! Every run resolves its flags into a [`config::RunConfig`], computes, and
//! writes one output file (CSV or JSON) that embeds the config and the
//! artifact version. Exit codes: 0 success, 1 computation failure or failed
//! verification, 2 invalid invocation (no file is written).

mod commands;
mod config;
mod output;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oar_core::quadrature::QuadratureSpec;
use oar_core::OarError;
use serde_json::json;

use config::{
    reachable_tail_tol, CommandConfig, CouplingsConfig, FilterChoice, Format, Grid, KernelKind, OracleKind, RunConfig,
    StateKind, Suite,
};
use output::{render, render_csv, render_report, resolve_output, sibling, write_atomic, Table};

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 1.
    Failure(String),
}

impl From<OarError> for CliError {
    fn from(e: OarError) -> Self {
        match e {
            OarError::UnsupportedOrder(_)
            | OarError::FilterInvariant { .. }
            | OarError::DegenerateCouplings
            | OarError::InvalidParameter(_)
            | OarError::UnsortedSites
            | OarError::StringTooLong(_)
            | OarError::SizeGuard(_)
            | OarError::FilterTooLong { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "oar", version, about = "Operator-algebraic renormalization of the Ising chain: tables, oracles and checks")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Low-pass filter: haar, d2, d4, ..., d20.
    #[arg(long, global = true, value_parser = FilterChoice::parse)]
    filter: Option<FilterChoice>,
    /// Raw filter coefficients (comma separated), bypassing validation in `verify`.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "filter")]
    coeffs: Option<Vec<f64>>,
    /// Transverse coupling t1.
    #[arg(long, global = true, default_value_t = 1.0)]
    t1: f64,
    /// Ising coupling t3.
    #[arg(long, global = true, default_value_t = 1.0)]
    t3: f64,
    /// Inverse temperature; omitted means the ground state.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Shorthand for t1 = t3 = 1 at zero temperature.
    #[arg(long, global = true, conflicts_with_all = ["t1", "t3", "beta"])]
    critical: bool,
    /// Number of renormalization steps.
    #[arg(long, global = true, default_value_t = 0)]
    m: u32,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, global = true, default_value_t = QuadratureSpec::default().panel_order)]
    panel_order: usize,
    /// Quadrature nodes per 2π.
    #[arg(long, global = true, default_value_t = QuadratureSpec::default().points)]
    points_per_period: usize,
    /// Relative tolerance of the node-doubling test.
    #[arg(long, global = true, default_value_t = QuadratureSpec::default().rel_tol)]
    rel_tol: f64,
    /// Admissible |ŝ|² tail mass; defaults to the finest decade the filter reaches.
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    /// Output file; the directory part is replaced by $OAR_OUTPUT_DIR when set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Filter coefficients h_n and high-pass g_n.
    Filters,
    /// Covariance kernel samples on a momentum grid.
    Kernel {
        #[arg(long, value_enum, default_value_t = KernelKind::Lattice)]
        kind: KernelKind,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        kmax: f64,
        /// Grid points, endpoints included.
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, default_value_t = 0.0)]
        mu0: f64,
        /// Continuum inverse temperature; omitted means zero temperature.
        #[arg(long)]
        beta0: Option<f64>,
        /// Continuum coupling t.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Renormalized two-point values ω^(m) for m = 0..M, with the scaling limit at criticality.
    Flow {
        /// η = δ_d while ξ = δ_0.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        separation: i64,
    },
    /// Spin-spin correlators via Pfaffians, with Toeplitz diagnostics.
    Spincorr {
        #[arg(long, value_enum, default_value_t = StateKind::Limit)]
        state: StateKind,
        #[arg(long, default_value_t = 10)]
        d_max: usize,
        /// Explicit non-decreasing site list instead of the separation table.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        sites: Option<Vec<i64>>,
        /// Append a fitted log-log slope of |⟨σ₀σ_d⟩| for d ≥ --fit-from.
        #[arg(long)]
        check_exponent: bool,
        #[arg(long, default_value_t = 6)]
        fit_from: usize,
    },
    /// Dense small-lattice oracles.
    Oracle {
        #[arg(long, value_enum, default_value_t = OracleKind::Partition)]
        kind: OracleKind,
        #[arg(long, default_value_t = 2)]
        half_width: usize,
        #[arg(long, default_value_t = 1)]
        half_height: usize,
        #[arg(long, default_value_t = 0.4407)]
        k1: f64,
        #[arg(long, default_value_t = 0.4407)]
        k2: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64])]
        trotter_steps: Vec<usize>,
    },
    /// Run the invariant suites; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, value_enum, default_value_t = Grid::Full)]
        grid: Grid,
    },
    /// Rerun the config embedded in an earlier output file (or a bare config JSON).
    Replay {
        input: PathBuf,
    },
}

fn default_name(command: &CommandConfig, format: Format) -> String {
    let ext = match command {
        CommandConfig::Verify { .. } => "json",
        _ => format.extension(),
    };
    format!("{}.{ext}", command.name())
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let c = cli.common;
    let command = match cli.command {
        Cmd::Filters => CommandConfig::Filters,
        Cmd::Kernel {
            kind,
            kmax,
            points,
            mu0,
            beta0,
            t,
        } => CommandConfig::Kernel {
            kind,
            kmax,
            points,
            mu0,
            beta0,
            t,
        },
        Cmd::Flow { separation } => CommandConfig::Flow { separation },
        Cmd::Spincorr {
            state,
            d_max,
            sites,
            check_exponent,
            fit_from,
        } => CommandConfig::Spincorr {
            state,
            d_max,
            sites,
            check_exponent,
            fit_from,
        },
        Cmd::Oracle {
            kind,
            half_width,
            half_height,
            k1,
            k2,
            trotter_steps,
        } => CommandConfig::Oracle {
            kind,
            half_width,
            half_height,
            k1,
            k2,
            trotter_steps,
        },
        Cmd::Verify { suite, grid } => CommandConfig::Verify { suite, grid },
        Cmd::Replay { .. } => unreachable!("handled before resolution"),
    };
    let filter = match (c.filter, c.coeffs) {
        (Some(f), _) => Some(f),
        (None, Some(coeffs)) => Some(FilterChoice::Custom { coeffs }),
        (None, None) => match command {
            CommandConfig::Flow { .. } => Some(FilterChoice::Daubechies { p: 2 }),
            CommandConfig::Spincorr { .. } => Some(FilterChoice::Daubechies { p: 4 }),
            CommandConfig::Oracle {
                kind: OracleKind::Channel, ..
            } => Some(FilterChoice::Daubechies { p: 1 }),
            _ => None,
        },
    };
    let couplings = if c.critical {
        CouplingsConfig::critical()
    } else {
        CouplingsConfig {
            t1: c.t1,
            t3: c.t3,
            beta: c.beta,
        }
    };
    let mut quadrature = QuadratureSpec {
        panel_order: c.panel_order,
        points: c.points_per_period,
        rel_tol: c.rel_tol,
        ..QuadratureSpec::default()
    };
    quadrature.validate()?;
    quadrature.tail_tol = match (c.tail_tol, &filter) {
        (Some(t), _) => t,
        (None, Some(f @ FilterChoice::Daubechies { .. })) => reachable_tail_tol(&f.build(), &quadrature),
        (None, _) => quadrature.tail_tol,
    };
    quadrature.validate()?;
    let output = resolve_output(c.output.as_deref(), &default_name(&command, c.format));
    Ok(RunConfig {
        command,
        filter,
        couplings,
        m: c.m,
        quadrature,
        output,
        format: c.format,
        seed: c.seed,
    })
}

/// Extracts a config from an earlier output file or a bare config JSON.
fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| CliError::Usage(format!("{} holds no usable config: {e}", path.display()));
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config: ")) {
        return serde_json::from_str(line).map_err(bad);
    }
    let v: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    let cfg = v.get("config").cloned().unwrap_or(v);
    serde_json::from_value(cfg).map_err(bad)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn bounds_table(sweep: &oar_core::errorbounds::BoundSweep) -> Table {
    use output::{num, opt_num};
    let mut t = Table::new(&[
        "m",
        "t0",
        "empirical",
        "bound",
        "kernel",
        "cosine",
        "sin_difference",
        "cos_difference",
        "holds",
    ]);
    for r in &sweep.reports {
        let c = r.components;
        t.push(vec![
            json!(r.m),
            num(r.t0),
            num(r.empirical_error),
            opt_num(r.certified_bound),
            opt_num(c.map(|c| c.kernel)),
            opt_num(c.map(|c| c.cosine)),
            opt_num(c.map(|c| c.sin_difference)),
            opt_num(c.map(|c| c.cos_difference)),
            r.holds().map(|h| json!(h)).unwrap_or(serde_json::Value::Null),
        ]);
    }
    t
}

/// Runs a resolved config; returns whether the run passed.
fn execute(cfg: &RunConfig) -> Result<bool, CliError> {
    match &cfg.command {
        CommandConfig::Verify { suite, grid } => {
            let report = verify::run(cfg, *suite, *grid)?;
            if let Some(sweep) = &report.sweep {
                write(&sibling(&cfg.output, "bounds.csv"), &render_csv(cfg, &bounds_table(sweep)))?;
            }
            let mut doc = serde_json::to_value(&report).expect("report serializes");
            if let Some(sweep) = &report.sweep {
                doc["sweep"] = json!({ "norms": sweep.norms, "norm_error": sweep.norm_error, "c_t": sweep.c_t() });
            }
            write(&cfg.output, &render_report(cfg, doc))?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {} ({})", c.suite, c.name, c.detail);
            }
            eprintln!(
                "{} of {} checks passed; report at {}",
                report.checks.iter().filter(|c| c.passed).count(),
                report.checks.len(),
                cfg.output.display()
            );
            Ok(report.passed)
        }
        _ => {
            let table = commands::run_table(cfg)?;
            write(&cfg.output, &render(cfg, &table))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.command {
        Cmd::Replay { input } => load_config(input).map(|mut cfg| {
            if cli.common.output.is_some() || std::env::var_os(output::OUTPUT_DIR_ENV).is_some() {
                let requested = cli.common.output.clone().unwrap_or_else(|| cfg.output.clone());
                cfg.output = resolve_output(Some(&requested), &default_name(&cfg.command, cfg.format));
            }
            cfg
        }),
        _ => resolve(cli),
    };
    let outcome = cfg.and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
