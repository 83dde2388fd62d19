//! Command-line front end for `sigvol`.
//!
//! Exit codes: `0` success, `1` a comparison or subpath scan disagreed
//! beyond the tolerance, `2` invalid input (bad flags, malformed curve
//! file, unwritable output path), `3` dimension mismatch.

use std::fs;
use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sigvol::{CurveFamily, CurveSpec};
use thiserror::Error;

mod commands;
pub mod output;

use output::Table;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "sigvol", version, about = "Convex hull volumes of curves via alternating path signatures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Top-level alternating signature of the curve.
    Volume(CommonArgs),
    /// Torsion, strict-determinant, d-order and cyclic class certificates.
    Classify(CommonArgs),
    /// Signature volume against the geometric hull oracles.
    Compare(CompareArgs),
    /// Zonotope of the curve's derivative and the identity vol(Z) = d!·α.
    Zonoid(CommonArgs),
    /// Skew spectrum of the signed-area matrix and the eigenvalue volume.
    Decompose(CommonArgs),
    /// Plot-ready data: traces, projections and zonoid boundaries.
    Plotdata(PlotArgs),
    /// Hull volume against α on a grid of subpaths (d = 2, 3).
    Subpath(SubpathArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Builtin curve family.
    #[arg(long, value_name = "NAME", value_parser = PossibleValuesParser::new(CurveSpec::KINDS),
          required_unless_present = "curve", conflicts_with = "curve")]
    pub builtin: Option<String>,
    /// Curve-definition JSON file.
    #[arg(long, value_name = "FILE")]
    pub curve: Option<PathBuf>,
    #[arg(long, value_name = "D")]
    pub dim: Option<usize>,
    /// Family parameters; for `pl`/`samples` the flattened vertices.
    #[arg(long, value_name = "a,b,c", value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// Discretization (segments, grid points or rows, depending on the command).
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,
    #[arg(long, value_name = "INT", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FLOAT", default_value_t = DEFAULT_TOLERANCE, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Monte-Carlo trials (d >= 4).
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = PlotKind::Trace)]
    pub plot: PlotKind,
}

#[derive(Debug, Clone, Args)]
pub struct SubpathArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Breakpoints per axis of the window grid.
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Columns `t, x1..xd`.
    Trace,
    /// Columns `t, u1..u(d-1)`: the curve rotated so its displacement is the
    /// last axis, with that axis dropped.
    Projection,
    /// Boundary of the zonotope (d = 2).
    Zonoid,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandKind {
    Volume,
    Classify,
    Compare { trials: u64 },
    Zonoid,
    Decompose,
    Plotdata { plot: PlotKind },
    Subpath { grid: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Builtin(CurveSpec),
    File { path: PathBuf, dim: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub curve: CurveSource,
    pub n: Option<usize>,
    pub seed: u64,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed curve file {path}: {reason}")]
    MalformedCurve { path: PathBuf, reason: String },
    #[error("cannot write {path}: {reason}")]
    Output { path: PathBuf, reason: String },
    #[error(transparent)]
    Compute(#[from] sigvol::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Compute(sigvol::Error::DimensionMismatch { .. }) => 3,
            _ => 2,
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (command, common) = match cli.command {
            Command::Volume(c) => (CommandKind::Volume, c),
            Command::Classify(c) => (CommandKind::Classify, c),
            Command::Compare(a) => (CommandKind::Compare { trials: a.trials }, a.common),
            Command::Zonoid(c) => (CommandKind::Zonoid, c),
            Command::Decompose(c) => (CommandKind::Decompose, c),
            Command::Plotdata(a) => (CommandKind::Plotdata { plot: a.plot }, a.common),
            Command::Subpath(a) => (CommandKind::Subpath { grid: a.grid }, a.common),
        };
        if common.n == Some(0) {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        if common.tol.is_nan() || common.tol <= 0.0 || common.tol.is_infinite() {
            return Err(CliError::Usage(format!("--tol must be a positive number, got {}", common.tol)));
        }
        if let CommandKind::Subpath { grid } = command {
            if grid < 3 {
                return Err(CliError::Usage(format!("--grid must be at least 3, got {grid}")));
            }
        }
        let curve = match (common.builtin, common.curve) {
            (Some(kind), None) => CurveSource::Builtin(builtin_spec(kind, common.dim, common.params)?),
            (None, Some(path)) => {
                if common.params.is_some() {
                    return Err(CliError::Usage("--params only applies to --builtin curves".into()));
                }
                CurveSource::File { path, dim: common.dim }
            }
            _ => return Err(CliError::Usage("exactly one of --builtin and --curve is required".into())),
        };
        Ok(Self {
            command,
            curve,
            n: common.n,
            seed: common.seed,
            tolerance: common.tol,
            output: common.out,
            format: common.format,
        })
    }

    pub fn load_curve(&self) -> Result<CurveFamily, CliError> {
        match &self.curve {
            CurveSource::Builtin(spec) => Ok(spec.build()?),
            CurveSource::File { path, dim } => {
                let malformed = |reason: String| CliError::MalformedCurve { path: path.clone(), reason };
                let text = fs::read_to_string(path).map_err(|e| malformed(e.to_string()))?;
                let mut spec: CurveSpec = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
                match (spec.dim, *dim) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(sigvol::Error::DimensionMismatch { expected: a, found: b }.into())
                    }
                    (None, Some(b)) => spec.dim = Some(b),
                    _ => {}
                }
                spec.build().map_err(|e| match e {
                    sigvol::Error::DimensionMismatch { .. } => CliError::Compute(e),
                    other => malformed(other.to_string()),
                })
            }
        }
    }
}

/// `pl` and `samples` take their vertices from `--params`, reshaped into
/// rows of length `--dim`.
fn builtin_spec(kind: String, dim: Option<usize>, params: Option<Vec<f64>>) -> Result<CurveSpec, CliError> {
    if kind == "pl" || kind == "samples" {
        let (Some(d), Some(flat)) = (dim, params) else {
            return Err(CliError::Usage(format!("--builtin {kind} needs --dim and --params (flattened vertices)")));
        };
        if d == 0 || flat.len() % d != 0 {
            return Err(CliError::Usage(format!("--params has {} values, not a multiple of --dim {d}", flat.len())));
        }
        let vertices = flat.chunks(d).map(<[f64]>::to_vec).collect();
        return Ok(CurveSpec { kind, dim: Some(d), params: None, vertices: Some(vertices) });
    }
    Ok(CurveSpec { kind, dim, params, vertices: None })
}

/// The result of a command, renderable in every output format.
#[derive(Debug, Clone)]
pub struct Report {
    pub value: Value,
    pub table: Option<Table>,
    /// Tabular commands print CSV unless another format is asked for.
    pub tabular: bool,
    pub exit_code: i32,
}

impl Report {
    pub fn render(&self, format: Option<Format>) -> String {
        let format = format.unwrap_or(if self.tabular { Format::Csv } else { Format::Text });
        match format {
            Format::Json => output::to_json(&self.value),
            Format::Csv => self.csv(),
            Format::Text if self.tabular => self.csv(),
            Format::Text => output::to_text(&self.value),
        }
    }

    fn csv(&self) -> String {
        match &self.table {
            Some(t) => t.to_csv(),
            None => Table::key_value(&self.value).to_csv(),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let curve = cfg.load_curve()?;
    commands::execute(cfg, &curve)
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute_cli(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute_cli(cli: Cli) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    // Fail on an unwritable destination before doing any work.
    let mut sink: Box<dyn std::io::Write> = match &cfg.output {
        Some(path) => Box::new(fs::File::create(path).map_err(|e| CliError::Output {
            path: path.clone(),
            reason: e.to_string(),
        })?),
        None => Box::new(std::io::stdout().lock()),
    };
    let report = run(&cfg)?;
    let text = report.render(cfg.format);
    sink.write_all(text.as_bytes()).and_then(|()| sink.flush()).map_err(|e| CliError::Output {
        path: cfg.output.clone().unwrap_or_else(|| "<stdout>".into()),
        reason: e.to_string(),
    })?;
    Ok(report.exit_code)
}
