//! Command-line driver.
//!
//! Exit codes: 0 success, 1 verification failure or residual above
//! tolerance, 2 configuration error, 3 I/O error.

pub mod grid;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytic::{ad_min_location, ad_threshold, de_optimal_location, pd_threshold};
use crate::channels::ChannelKind;
use crate::qfi::Qubits;
use crate::qstate::ResourceParams;
use grid::{parse_angle, Grid};
use sweep::{
    figure_data, run_sweep, write_csv, write_figure_csv, write_json, FigureId, OutputFormat,
    SweepConfig, DEFAULT_FIGURE_POINTS,
};
use verify::{run_verify, Fault, VerifyLevel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_error(path: Option<&Path>, e: io::Error) -> CliError {
    match path {
        Some(p) => CliError::Io(format!("{}: {e}", p.display())),
        None => CliError::Io(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "memqfi",
    version,
    about = "QFI of probes teleported through correlated noise"
)]
pub struct Cli {
    /// Worker threads (0 uses all cores). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F_θ and F_φ over a parameter grid.
    Sweep(Box<SweepArgs>),
    /// Single- and two-qubit QFI surfaces over (D, μ).
    Figure(FigureArgs),
    /// Memory threshold where the optimal θ switches.
    Threshold(ThresholdArgs),
    /// Decoherence strength minimizing the amplitude-damping F_θ(π/2).
    Minloc(MinlocArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

fn parse_c(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected c1,c2,c3, got '{s}'"));
    }
    let mut c = [0.0; 3];
    for (dst, p) in c.iter_mut().zip(parts) {
        *dst = parse_angle(p)?;
    }
    Ok(c)
}

fn parse_list<T: std::str::FromStr<Err = String>>(s: &str) -> Result<Vec<T>, String> {
    s.split(',').map(str::parse).collect()
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated channel kinds (ad, pd, de).
    #[arg(long)]
    pub channel: Option<String>,
    /// start:stop:count, or a single value.
    #[arg(long)]
    pub d_grid: Option<Grid>,
    /// Memory parameter grid in [0, 1].
    #[arg(long)]
    pub mu_grid: Option<Grid>,
    /// Accepts pi expressions such as 0:pi:9 or pi/2.
    #[arg(long)]
    pub theta_grid: Option<Grid>,
    /// Must stay below 2pi.
    #[arg(long)]
    pub phi_grid: Option<Grid>,
    /// Resource correlations c1,c2,c3.
    #[arg(long, value_parser = parse_c, allow_hyphen_values = true)]
    pub c: Option<[f64; 3]>,
    /// Probe size, 1 or 2.
    #[arg(long)]
    pub qubits: Option<Qubits>,
    /// Comma-separated subset of analytic, spectral, bloch.
    #[arg(long)]
    pub method: Option<String>,
    /// Finite-difference step in [1e-7, 1e-3].
    #[arg(long)]
    pub step: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// 1 for F_θ, 2 for F_φ.
    #[arg(long)]
    pub id: u8,
    /// ad, pd or de.
    #[arg(long)]
    pub channel: ChannelKind,
    /// + selects c = (1, 1, -1), - selects c = (-1, -1, -1).
    #[arg(long, allow_hyphen_values = true)]
    pub sign: String,
    /// Points per axis.
    #[arg(long, default_value_t = DEFAULT_FIGURE_POINTS)]
    pub points: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// ad or pd; de reports the optimal θ location.
    #[arg(long)]
    pub channel: ChannelKind,
    /// Resource correlations c1,c2,c3.
    #[arg(long, value_parser = parse_c, allow_hyphen_values = true)]
    pub c: [f64; 3],
    /// Decoherence strength in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    /// Probe phase.
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: f64,
}

#[derive(Debug, Args)]
pub struct MinlocArgs {
    /// Resource correlation c3 in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub c3: f64,
    /// Memory parameter.
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Grid density.
    #[arg(long, value_enum, default_value_t = VerifyLevel::Quick)]
    pub level: VerifyLevel,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Corrupt part of the model to check that failures are reported.
    #[arg(long, value_enum)]
    pub inject_fault: Option<Fault>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| io_error(Some(p), e)),
        None => io::stdout().write_all(bytes).map_err(|e| io_error(None, e)),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes to JSON") + "\n"
}

pub fn resolve_sweep_config(args: &SweepArgs) -> Result<SweepConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_error(Some(p), e))?;
            SweepConfig::from_toml(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(v) = &args.channel {
        cfg.channels = parse_list(v).map_err(|e| CliError::Config(format!("--channel: {e}")))?;
    }
    if let Some(v) = args.d_grid {
        cfg.d_grid = v;
    }
    if let Some(v) = args.mu_grid {
        cfg.mu_grid = v;
    }
    if let Some(v) = args.theta_grid {
        cfg.theta_grid = v;
    }
    if let Some(v) = args.phi_grid {
        cfg.phi_grid = v;
    }
    if let Some(v) = args.c {
        cfg.c = v;
    }
    if let Some(v) = args.qubits {
        cfg.qubits = v;
    }
    if let Some(v) = &args.method {
        cfg.methods = parse_list(v).map_err(|e| CliError::Config(format!("--method: {e}")))?;
    }
    if let Some(v) = args.step {
        cfg.step = v;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = resolve_sweep_config(args)?;
    if args.print_config {
        return emit(None, cfg.to_toml().as_bytes());
    }
    let output = run_sweep(&cfg)?;
    let mut buf = Vec::new();
    match cfg.format {
        OutputFormat::Csv => write_csv(&output.records, &mut buf),
        OutputFormat::Json => write_json(&output, &mut buf),
    }
    .map_err(|e| io_error(None, e))?;
    emit(cfg.out.as_deref(), &buf)?;

    let s = &output.summary;
    match s.max_residual {
        Some(r) => eprintln!("{} rows, max |analytic - numeric| residual {r:.3e}", s.rows),
        None => eprintln!("{} rows", s.rows),
    }
    if s.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "residual above tolerance {:.0e}",
            s.tolerance
        )))
    }
}

fn cmd_figure(args: &FigureArgs) -> Result<(), CliError> {
    let id = FigureId::from_number(args.id)?;
    let positive = match args.sign.as_str() {
        "+" | "plus" => true,
        "-" | "minus" => false,
        other => {
            return Err(CliError::Config(format!(
                "sign must be + or -, got '{other}'"
            )))
        }
    };
    let rows = figure_data(id, args.channel, positive, args.points)?;
    let mut buf = Vec::new();
    write_figure_csv(&rows, &mut buf).map_err(|e| io_error(None, e))?;
    emit(args.out.as_deref(), &buf)
}

#[derive(Serialize)]
struct LocationReport {
    c: [f64; 3],
    phi: f64,
    location: crate::analytic::ThetaLocation,
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<(), CliError> {
    let [c1, c2, c3] = args.c;
    let c = ResourceParams::new(c1, c2, c3)?;
    let json = match args.channel {
        ChannelKind::PhaseDamping => to_json(&pd_threshold(&c, args.d, args.phi)?),
        ChannelKind::AmplitudeDamping => to_json(&ad_threshold(&c, args.d, args.phi)?),
        ChannelKind::Depolarizing => to_json(&LocationReport {
            c: args.c,
            phi: args.phi,
            location: de_optimal_location(&c, args.phi),
        }),
    };
    emit(None, json.as_bytes())
}

#[derive(Serialize)]
struct MinlocReport {
    c3: f64,
    mu: f64,
    d_min: f64,
}

fn cmd_minloc(args: &MinlocArgs) -> Result<(), CliError> {
    let d_min = ad_min_location(args.c3, args.mu)?;
    let report = MinlocReport {
        c3: args.c3,
        mu: args.mu,
        d_min,
    };
    emit(None, to_json(&report).as_bytes())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let report = run_verify(args.level, args.inject_fault);
    eprint!("{}", report.summary());
    let json = to_json(&report);
    match &args.out {
        Some(p) => emit(Some(p), json.as_bytes())?,
        None => emit(None, json.as_bytes())?,
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} checks failed", report.failed)))
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cli.workers)))?;
    pool.install(|| match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Minloc(a) => cmd_minloc(a),
        Command::Verify(a) => cmd_verify(a),
    })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("memqfi: {e}");
            e.exit_code()
        }
    }
}
