//! Command-line experiment runner: model fitting, metric curves, seeded
//! simulation, figure data generation and the release validation report.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure,
//! 3 validation failure.

mod commands;
mod spec;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use spec::{MethodSel, RunSpec, SchemeSel, SpecFile, UsageError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "rischan",
    version,
    about = "SNR statistics and link metrics for two reflecting-surface setups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the squared-K_G shaping parameters of the dual-hop cascade.
    Fit(CommonArgs),
    /// Write outage/BER/capacity curve CSVs (closed form, quadrature
    /// twin, asymptote and bound columns).
    Curves(CommonArgs),
    /// Run the seeded Monte Carlo simulator and write empirical CSVs.
    Simulate(CommonArgs),
    /// Reproduce the five standard figures as CSV (and optional SVG).
    Figures(CommonArgs),
    /// Run the release validation suite and write a JSON report.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// JSON config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// dh | t | both
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated element counts, e.g. 1,2,4,8,64
    #[arg(long)]
    n: Option<String>,
    /// Average-SNR grid in dB as start:stop:step
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    /// Outage threshold in dB
    #[arg(long = "gamma-th-db")]
    gamma_th_db: Option<f64>,
    /// dpsk | custom:p,q
    #[arg(long = "mod")]
    modulation: Option<String>,
    /// Monte Carlo samples per run
    #[arg(long)]
    samples: Option<u64>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of RNG substreams (must divide samples)
    #[arg(long)]
    substreams: Option<u32>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render SVG quick-look plots
    #[arg(long)]
    svg: bool,
    /// closed | quad | both: which evaluation columns to fill
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Multiply every validation threshold (0.01 tightens 100x)
    #[arg(long = "tol-scale")]
    tol_scale: Option<f64>,
    /// Run only these criterion ids (comma-separated, 1..=10)
    #[arg(long)]
    criteria: Option<String>,
}

fn resolve(
    common: &CommonArgs,
    tol_scale: Option<f64>,
    criteria: Option<&str>,
) -> Result<RunSpec, UsageError> {
    let file: SpecFile = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))?
        }
        None => SpecFile::default(),
    };

    let scheme = match common.scheme.as_deref().or(file.scheme.as_deref()) {
        Some(s) => spec::parse_scheme(s)?,
        None => SchemeSel::Both,
    };
    let n_list = match common.n.as_deref().or(file.n.as_deref()) {
        Some(s) => spec::parse_n_list(s)?,
        None => vec![1, 2, 4, 8, 64],
    };
    let (snr_start_db, snr_stop_db, snr_step_db) =
        match common.snr_db.as_deref().or(file.snr_db.as_deref()) {
            Some(s) => spec::parse_snr_range(s)?,
            None => (0.0, 60.0, 2.0),
        };
    let gamma_th_db = common.gamma_th_db.or(file.gamma_th_db).unwrap_or(20.0);
    let (modulation, modulation_label) =
        match common.modulation.as_deref().or(file.modulation.as_deref()) {
            Some(s) => spec::parse_modulation(s)?,
            None => (rischan::metrics::ModulationParams::dpsk(), "dpsk".into()),
        };
    let samples = common.samples.or(file.samples).unwrap_or(100_000);
    let seed = common.seed.or(file.seed).unwrap_or(12345);
    let substreams = common.substreams.or(file.substreams).unwrap_or(16);
    let out_dir = common
        .out
        .clone()
        .or(file.out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let svg = common.svg || file.svg.unwrap_or(false);
    let method = match common.method.as_deref().or(file.method.as_deref()) {
        Some(s) => spec::parse_method(s)?,
        None => MethodSel::Both,
    };
    let tol_scale = tol_scale.or(file.tol_scale).unwrap_or(1.0);
    if !(tol_scale > 0.0) {
        return Err(UsageError("--tol-scale must be positive".into()));
    }
    let criteria = match criteria.or(file.criteria.as_deref()) {
        Some(s) => Some(spec::parse_criteria(s)?),
        None => None,
    };

    let command_line: Vec<String> = std::env::args().collect();
    Ok(RunSpec {
        scheme,
        n_list,
        snr_start_db,
        snr_stop_db,
        snr_step_db,
        gamma_th_db,
        modulation,
        modulation_label,
        samples,
        seed,
        substreams,
        out_dir,
        svg,
        method,
        tol_scale,
        criteria,
        command_line: command_line.join(" "),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::SUCCESS;
                }
                _ => 1,
            };
            eprint!("{e}");
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Fit(a) => resolve(a, None, None).map_err(Fail::Usage).and_then(commands::cmd_fit),
        Command::Curves(a) => resolve(a, None, None)
            .map_err(Fail::Usage)
            .and_then(commands::cmd_curves),
        Command::Simulate(a) => resolve(a, None, None)
            .map_err(Fail::Usage)
            .and_then(commands::cmd_simulate),
        Command::Figures(a) => resolve(a, None, None)
            .map_err(Fail::Usage)
            .and_then(commands::cmd_figures),
        Command::Validate(a) => resolve(&a.common, a.tol_scale, a.criteria.as_deref())
            .map_err(Fail::Usage)
            .and_then(commands::cmd_validate),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Usage(e)) => {
            eprintln!("usage error: {e}");
            ExitCode::from(1)
        }
        Err(Fail::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Validation(msg)) => {
            eprintln!("validation failure: {msg}");
            ExitCode::from(3)
        }
        Err(Fail::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Failure taxonomy mapped onto the exit codes.
#[derive(Debug)]
pub enum Fail {
    Usage(UsageError),
    Numerical(String),
    Validation(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Io(e)
    }
}
