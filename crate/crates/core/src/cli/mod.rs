//! `qswitch` command-line front end.

pub mod config;
pub mod figures;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::channels::{kraus_protocol1, kraus_protocol2, KrausSet};
use crate::protocols::{Protocol, Simulator};
use crate::report::FidelityReport;
use crate::states::{InputParams, SwitchParams};
use config::{
    read_config_file, to_radians, Format, GridSize, OutcomeChoice, Overrides, ProtocolChoice,
    SweepConfig,
};
use table::{build_table, emit, GridRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] crate::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Domain(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qswitch",
    version,
    about = "Teleportation through a quantum switch: closed forms against simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every value at one switch state
    Point(PointArgs),
    /// Grid of values over (theta, phi)
    Sweep(GridArgs),
    /// Compare closed forms with the simulator over the grid
    Verify(GridArgs),
    /// Write the figure data files into --out (a directory)
    Figures(GridArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Protocols to include
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolChoice>,
    /// Keep only this post-selection outcome
    #[arg(long, value_enum)]
    pub outcome: Option<OutcomeChoice>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (directory for `figures`); standard output otherwise
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest accepted |numeric - analytic|
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Angles in degrees instead of radians
    #[arg(long)]
    pub degrees: bool,
    /// Add X to one entry of the first Kraus operator (fault injection)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    /// Input qubit polar angle (with --phi-prime)
    #[arg(long, allow_negative_numbers = true, requires = "phi_prime")]
    pub theta_prime: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "theta_prime")]
    pub phi_prime: Option<f64>,
    /// Also run the simulator and report discrepancies
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Grid size as THETAxPHI
    #[arg(long, value_name = "TxP")]
    pub grid: Option<GridSize>,
    /// key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Append simulated values and errors (sweep only)
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn overrides(common: &CommonArgs, grid: Option<GridSize>, verify: bool) -> Overrides {
    Overrides {
        grid,
        protocol: common.protocol,
        outcome: common.outcome,
        format: common.format,
        tolerance: common.tolerance,
        jobs: common.jobs,
        degrees: common.degrees,
        perturb: common.perturb,
        verify,
        out: common.out.clone(),
    }
}

fn grid_config(args: &GridArgs) -> Result<SweepConfig, CliError> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => Default::default(),
    };
    SweepConfig::resolve(file, &overrides(&args.common, args.grid, args.verify))
}

fn perturb_set(set: KrausSet, delta: f64) -> KrausSet {
    let (r, c) = set.largest_entry(0);
    set.perturbed(0, r, c, delta)
}

/// Simulator for the selected protocols, with the fault injected if asked.
pub fn build_simulator(perturb: Option<f64>, protocols: &[Protocol]) -> Result<Simulator, CliError> {
    let mut p1 = kraus_protocol1()?;
    let mut p2 = kraus_protocol2()?;
    if let Some(delta) = perturb {
        if protocols.contains(&Protocol::One) {
            p1 = perturb_set(p1, delta);
        }
        if protocols.contains(&Protocol::Two) {
            p2 = perturb_set(p2, delta);
        }
    }
    Ok(Simulator::from_kraus(p1, p2)?)
}

fn cmd_point(args: &PointArgs) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(Default::default(), &overrides(&args.common, None, args.verify))?;
    let deg = cfg.degrees;
    let switch = SwitchParams::new(to_radians(args.theta, deg), to_radians(args.phi, deg))?;
    let input = match (args.theta_prime, args.phi_prime) {
        (Some(t), Some(p)) => Some(InputParams::new(to_radians(t, deg), to_radians(p, deg))?),
        _ => None,
    };
    let sim = if cfg.verify {
        Some(build_simulator(cfg.perturb, &cfg.protocols)?)
    } else {
        None
    };
    let report = FidelityReport::build(sim.as_ref(), &switch, input.as_ref(), &cfg.protocols)?;

    let text = match args.common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            if deg {
                for key in ["theta", "phi"] {
                    v[key] = serde_json::json!(report_angle(&v[key]));
                }
                if let Some(inp) = v.get_mut("input") {
                    for key in ["theta_prime", "phi_prime"] {
                        inp[key] = serde_json::json!(report_angle(&inp[key]));
                    }
                }
            }
            table::round_json(&mut v);
            let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let row = GridRow {
                theta: switch.theta(),
                phi: switch.phi(),
                analytic: report.analytic,
                numeric: report.numeric,
            };
            build_table(&cfg, &[row], cfg.verify).to_csv()
        }
    };
    emit(cfg.out.as_deref(), &text)?;

    match report.max_abs_discrepancy {
        // NaN must fail too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        Some(d) if !(d <= cfg.tolerance) => Err(CliError::Verification(format!(
            "max_abs_discrepancy {d:e} exceeds tolerance {:e}",
            cfg.tolerance
        ))),
        _ => Ok(()),
    }
}

fn report_angle(v: &serde_json::Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN).to_degrees()
}

fn cmd_sweep(args: &GridArgs) -> Result<(), CliError> {
    let cfg = grid_config(args)?;
    let sim = if cfg.verify {
        Some(build_simulator(cfg.perturb, &cfg.protocols)?)
    } else {
        None
    };
    let rows = table::evaluate_grid(&cfg, sim.as_ref())?;
    let t = build_table(&cfg, &rows, cfg.verify);
    emit(cfg.out.as_deref(), &t.render(cfg.format))?;
    if cfg.verify {
        let worst = t
            .header
            .iter()
            .enumerate()
            .filter(|(_, h)| h.ends_with("_err"))
            .flat_map(|(i, _)| t.rows.iter().map(move |r| r[i]))
            .fold(0.0, |m: f64, e| if e.is_nan() { f64::INFINITY } else { m.max(e) });
        if worst > cfg.tolerance {
            return Err(CliError::Verification(format!(
                "largest error {worst:e} exceeds tolerance {:e}",
                cfg.tolerance
            )));
        }
    }
    Ok(())
}

fn cmd_verify(args: &GridArgs) -> Result<(), CliError> {
    let cfg = grid_config(args)?;
    let sim = build_simulator(cfg.perturb, &cfg.protocols)?;
    let summary = verify::verify(&cfg, &sim)?;
    let mut v = serde_json::to_value(&summary).expect("summary serializes");
    table::round_json(&mut v);
    let mut text = serde_json::to_string_pretty(&v).expect("summary serializes");
    text.push('\n');
    emit(cfg.out.as_deref(), &text)?;
    if summary.passed {
        Ok(())
    } else {
        let names: Vec<_> = summary
            .checks
            .iter()
            .filter(|c| c.status == verify::Status::Fail)
            .map(|c| c.name.as_str())
            .collect();
        Err(CliError::Verification(names.join(", ")))
    }
}

fn cmd_figures(args: &GridArgs) -> Result<(), CliError> {
    let cfg = grid_config(args)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    let summary = figures::write_figures(&cfg, &dir)?;
    let mut v = serde_json::to_value(&summary).expect("summary serializes");
    table::round_json(&mut v);
    let mut text = serde_json::to_string_pretty(&v).expect("summary serializes");
    text.push('\n');
    emit(None, &text)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Point(a) => cmd_point(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Figures(a) => cmd_figures(a),
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
