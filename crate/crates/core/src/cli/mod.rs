//! Command-line front end. Every run resolves flags, an optional TOML config
//! and per-command defaults into one [`RunConfig`], executes the command and
//! writes a versioned JSON report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (or a
//! numerical result cannot be certified), 2 for invalid input.

mod commands;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::report::Check;

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_DIR_ENV: &str = "INFLEXION_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Collar,
    Extend,
    Transform,
    VerifyDecay,
    VerifyInversion,
    Conjecture,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Collar => "collar",
            CommandName::Extend => "extend",
            CommandName::Transform => "transform",
            CommandName::VerifyDecay => "verify-decay",
            CommandName::VerifyInversion => "verify-inversion",
            CommandName::Conjecture => "conjecture",
        }
    }
}

/// Fully resolved settings of one run. Keys mirror the long flags with
/// dashes replaced by underscores; tolerances live in their own table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    pub model: String,
    pub dim: usize,
    pub n: usize,
    pub d: u32,
    pub m: f64,
    pub m_schedule: Vec<f64>,
    pub jet: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub k_samples: usize,
    pub grid_points: usize,
    pub out_dir: String,
    pub report: String,
    /// Empty for no CSV output.
    pub csv: String,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Defaults for `command`; the schedule depends on `dim`.
    pub fn defaults(command: CommandName, dim: usize) -> RunConfig {
        let m_schedule = match (command, dim) {
            (CommandName::Conjecture, _) => (4..=14).map(|k| 2f64.powi(k)).collect(),
            (_, 3) => vec![3.0, 6.0],
            _ => vec![4.0, 8.0, 16.0],
        };
        let (k_min, k_max) = match command {
            CommandName::VerifyInversion => (0.75, 3.0),
            _ => (5.0, 50.0),
        };
        RunConfig {
            command,
            model: "gaussian{sigma=1}".into(),
            dim,
            n: 3,
            d: 1,
            m: 100.0,
            m_schedule,
            jet: Vec::new(),
            seed: 0,
            trials: 25,
            n_min: 3,
            n_max: 6,
            k_min,
            k_max,
            k_samples: 16,
            grid_points: 0,
            out_dir: ".".into(),
            report: format!("{}-report.json", command.as_str()),
            csv: String::new(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn report_path(&self) -> PathBuf {
        Path::new(&self.out_dir).join(&self.report)
    }
}

/// Partial config as read from a file: any key may be absent.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<CommandName>,
    model: Option<String>,
    dim: Option<usize>,
    n: Option<usize>,
    d: Option<u32>,
    m: Option<f64>,
    m_schedule: Option<Vec<f64>>,
    jet: Option<Vec<f64>>,
    seed: Option<u64>,
    trials: Option<usize>,
    n_min: Option<usize>,
    n_max: Option<usize>,
    k_min: Option<f64>,
    k_max: Option<f64>,
    k_samples: Option<usize>,
    grid_points: Option<usize>,
    out_dir: Option<String>,
    report: Option<String>,
    csv: Option<String>,
    tolerances: Option<Tolerances>,
}

#[derive(Debug, Parser)]
#[command(name = "inflexion", version, about = "Construct compactly supported high-order extensions and verify their Fourier behaviour")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one collar polynomial from a boundary jet and check it.
    Collar(RunArgs),
    /// Build extensions over an m schedule; check seams, budgets and collar bounds.
    Extend(RunArgs),
    /// Transform an extension at sampled wave vectors (and optionally on a grid).
    Transform(RunArgs),
    /// Check the decay bound, fit the decay exponent and minimise α.
    VerifyDecay(RunArgs),
    /// Check convergence of transforms, inversion, multiplier identities and the radial limit.
    VerifyInversion(RunArgs),
    /// Scan random jets for root-free collars (evidence only).
    Conjecture(RunArgs),
}

impl Command {
    fn split(self) -> (CommandName, RunArgs) {
        match self {
            Command::Collar(a) => (CommandName::Collar, a),
            Command::Extend(a) => (CommandName::Extend, a),
            Command::Transform(a) => (CommandName::Transform, a),
            Command::VerifyDecay(a) => (CommandName::VerifyDecay, a),
            Command::VerifyInversion(a) => (CommandName::VerifyInversion, a),
            Command::Conjecture(a) => (CommandName::Conjecture, a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with any subset of the settings below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the effective configuration as TOML to this path.
    #[arg(long)]
    pub write_config: Option<PathBuf>,
    /// Model, e.g. `gaussian{sigma=1}`, `rational{c=1,p=6}`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Extension order (number of matched derivatives).
    #[arg(long)]
    pub n: Option<usize>,
    /// Collar exponent: the collar width is m^-d.
    #[arg(long)]
    pub d: Option<u32>,
    /// Inner edge of a single collar.
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub m_schedule: Option<Vec<f64>>,
    /// Boundary jet a_0,...,a_{n-1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub jet: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_samples: Option<usize>,
    /// Points per axis for grid exports and FFT fields; 0 disables.
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<String>,
    /// Report file name inside the output directory.
    #[arg(long)]
    pub report: Option<String>,
    /// CSV output path for field or spectral dumps.
    #[arg(long)]
    pub csv: Option<String>,
    #[arg(long)]
    pub tol_residual: Option<f64>,
    #[arg(long)]
    pub tol_quadrature: Option<f64>,
    #[arg(long)]
    pub tol_seam: Option<f64>,
    #[arg(long)]
    pub tol_fourier: Option<f64>,
}

/// Merge defaults, the config file (if any) and flags, in increasing
/// precedence.
pub fn resolve(command: CommandName, args: &RunArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<ConfigFile>(&text).map_err(|e| Error::Parse(e.to_string()))?
        }
        None => ConfigFile::default(),
    };
    if let Some(c) = file.command {
        if c != command {
            return Err(Error::InvalidInput(format!(
                "config file is for '{}', not '{}'",
                c.as_str(),
                command.as_str()
            )));
        }
    }
    let dim = args.dim.or(file.dim).unwrap_or(1);
    let mut cfg = RunConfig::defaults(command, dim);
    macro_rules! take {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field.clone().or(file.$field.clone()) { cfg.$field = v; })*
        };
    }
    take!(model, n, d, m, m_schedule, jet, seed, trials, n_min, n_max, k_min, k_max, k_samples, grid_points, out_dir, report, csv);
    if let Some(t) = file.tolerances {
        cfg.tolerances = t;
    }
    let tol = &mut cfg.tolerances;
    for (flag, slot) in [
        (args.tol_residual, &mut tol.residual),
        (args.tol_quadrature, &mut tol.quadrature),
        (args.tol_seam, &mut tol.seam),
        (args.tol_fourier, &mut tol.fourier),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// The JSON document written for every run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: CommandName,
    pub evidence_only: bool,
    pub effective_config: RunConfig,
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
    /// Set when a numerical result could not be certified.
    pub error: Option<String>,
    pub status: Status,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// Run a resolved configuration. `Err` means invalid input.
pub fn execute(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let outcome = commands::dispatch(cfg);
    let (checks, details, error) = match outcome {
        Ok(report) => (report.checks, report.details, None),
        Err(e @ (Error::Accuracy(_) | Error::Aliasing { .. } | Error::Overflow(_))) => {
            (vec![Check::holds("certified", false)], Map::new(), Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let pass = error.is_none() && checks.iter().all(|c| c.pass);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        command: cfg.command,
        evidence_only: cfg.command == CommandName::Conjecture,
        effective_config: cfg.clone(),
        checks,
        details,
        error,
        status: if pass { Status::Pass } else { Status::Fail },
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn write_outputs(cfg: &RunConfig, args: &RunArgs, report: &RunReport) -> Result<PathBuf> {
    if let Some(path) = &args.write_config {
        std::fs::write(path, cfg.to_toml())?;
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.report_path();
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Parse arguments (including the program name), run, and return the exit
/// code. Usage errors go to stderr with code 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, args) = cli.command.split();
    let result = resolve(name, &args).and_then(|cfg| {
        let report = execute(&cfg)?;
        let path = write_outputs(&cfg, &args, &report)?;
        Ok((report, path))
    });
    match result {
        Ok((report, path)) => {
            let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            println!(
                "{}: {:?} ({} checks, {} failed) -> {}",
                name.as_str(),
                report.status,
                report.checks.len(),
                failed.len(),
                path.display()
            );
            for f in failed {
                println!("  failed: {f}");
            }
            if let Some(e) = &report.error {
                println!("  error: {e}");
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("inflexion {}: {e}", name.as_str());
            2
        }
    }
}
