//! Front end for `bohr-core`: loads JSON instances, dispatches to the
//! evaluators and writes canonical JSON reports.
//!
//! Exit codes: 0 certified / holds / no violation, 2 refuted / violation,
//! 1 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bohr_core::instance::{InequalityId, Instance};
use bohr_core::order::{certify, CertificateStatus, QuadraticCertificateProblem};
use bohr_core::search::{falsify, fuzz, fuzz_instance, generate_valid, rng_from_seed, FuzzConfig, Violation};
use bohr_core::Tol;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const ATOL_VAR: &str = "BOHR_TOL_ATOL";
pub const RTOL_VAR: &str = "BOHR_TOL_RTOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: invalid instance: {source}")]
    Validation { path: String, source: bohr_core::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bohr_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "bohr", version, about = "Certify, check and falsify Bohr-type operator inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Indent the report.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    /// Decide a certificate problem or template by its coefficient matrix.
    Certify {
        #[arg(long, value_name = "PATH")]
        instance: PathBuf,
    },
    /// Evaluate one instance; without --instance one is drawn from --seed.
    Check {
        #[arg(long, value_name = "ID", required_unless_present = "instance")]
        #[serde(skip_serializing_if = "Option::is_none")]
        inequality: Option<InequalityId>,
        #[arg(long, value_name = "PATH")]
        #[serde(skip_serializing_if = "Option::is_none")]
        instance: Option<PathBuf>,
        #[arg(long, value_name = "N", default_value_t = 3)]
        dim: usize,
        #[arg(long, value_name = "U64", default_value_t = 0)]
        seed: u64,
    },
    /// Seeded random trials; --instance pins the parameters.
    Fuzz {
        #[arg(long, value_name = "ID", required_unless_present = "instance")]
        #[serde(skip_serializing_if = "Option::is_none")]
        inequality: Option<InequalityId>,
        #[arg(long, value_name = "PATH")]
        #[serde(skip_serializing_if = "Option::is_none")]
        instance: Option<PathBuf>,
        #[arg(long, value_name = "N", default_value_t = 3)]
        dim: usize,
        #[arg(long, value_name = "N", default_value_t = 100)]
        trials: usize,
        #[arg(long, value_name = "U64", default_value_t = 0)]
        seed: u64,
    },
    /// Search for operators violating a certificate problem.
    Falsify {
        #[arg(long, value_name = "PATH")]
        instance: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 2)]
        dim: usize,
        #[arg(long, value_name = "N", default_value_t = 1000)]
        iters: usize,
        #[arg(long, value_name = "U64", default_value_t = 0)]
        seed: u64,
    },
    /// Eigenvalue majorization checks (major_jensen, eigen_bohr).
    Majorize {
        #[arg(long, value_name = "PATH")]
        instance: PathBuf,
    },
}

/// Everything a run produces besides the exit code.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Command,
    pub outcome: Value,
    pub tolerance: Tol,
    pub version: &'static str,
    /// SHA-256 of the instance file, when one was read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
}

/// What a JSON file parsed into.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Instance(Instance<f64>),
    Problem(QuadraticCertificateProblem<f64>),
}

impl Loaded {
    pub fn into_instance(self) -> Instance<f64> {
        match self {
            Loaded::Instance(inst) => inst,
            Loaded::Problem(problem) => Instance::Quadratic { problem, operators: None },
        }
    }
}

fn parse_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse { path: path.display().to_string(), line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses and validates an instance. Objects with an `"id"` are tagged
/// instances; anything else must be a bare certificate problem.
pub fn parse_instance(path: &Path, text: &str) -> Result<Loaded, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    let loaded = if value.get("id").is_some() {
        Loaded::Instance(serde_json::from_str(text).map_err(|e| parse_error(path, e))?)
    } else {
        Loaded::Problem(serde_json::from_str(text).map_err(|e| parse_error(path, e))?)
    };
    if let Loaded::Instance(inst) = &loaded {
        inst.validate().map_err(|source| CliError::Validation { path: path.display().to_string(), source })?;
    }
    Ok(loaded)
}

/// Reads `path`; returns the instance and the SHA-256 of the raw bytes.
pub fn load_instance(path: &Path) -> Result<(Loaded, String), CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| CliError::Usage(format!("{}: not UTF-8: {e}", path.display())))?;
    Ok((parse_instance(path, &text)?, digest))
}

fn env_float(name: &str) -> Result<Option<f64>, CliError> {
    match std::env::var(name) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Usage(format!("{name}: not a number: {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{name}: {e}"))),
    }
}

/// Defaults overridden by `BOHR_TOL_ATOL` / `BOHR_TOL_RTOL`.
pub fn tolerance_from_env() -> Result<Tol, CliError> {
    let d = Tol::default();
    let atol = env_float(ATOL_VAR)?.unwrap_or(d.atol);
    let rtol = env_float(RTOL_VAR)?.unwrap_or(d.rtol);
    Ok(Tol::new(atol, rtol)?)
}

fn to_value<S: Serialize>(x: &S) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))
}

fn id_matches(requested: Option<InequalityId>, inst: &Instance<f64>) -> Result<(), CliError> {
    match requested {
        Some(id) if id != inst.id() => {
            Err(CliError::Usage(format!("--inequality {id} does not match instance id {}", inst.id())))
        }
        _ => Ok(()),
    }
}

fn certificate_problem(inst: &Instance<f64>) -> Result<QuadraticCertificateProblem<f64>, CliError> {
    match inst.problem() {
        Some(p) => Ok(p?),
        None => Err(CliError::Usage(format!("{} is not a certificate template or problem", inst.id()))),
    }
}

/// Runs `command` and returns the report with its exit code.
pub fn execute(command: &Command, tol: &Tol) -> Result<(Report, i32), CliError> {
    let mut digest = None;
    let mut load = |path: &Path| -> Result<Instance<f64>, CliError> {
        let (loaded, d) = load_instance(path)?;
        digest = Some(d);
        Ok(loaded.into_instance())
    };
    let (outcome, code) = match command {
        Command::Certify { instance } => {
            let inst = load(instance)?;
            let result = certify(&certificate_problem(&inst)?, tol)?;
            let code = if result.status == CertificateStatus::Certified { EXIT_OK } else { EXIT_REFUTED };
            (to_value(&result)?, code)
        }
        Command::Check { inequality, instance, dim, seed } => {
            let inst = match instance {
                Some(path) => {
                    let inst = load(path)?;
                    id_matches(*inequality, &inst)?;
                    inst
                }
                None => {
                    let id = inequality.expect("clap requires --inequality without --instance");
                    generate_valid(id, &mut rng_from_seed(*seed), *dim, 1.0)?
                }
            };
            let out = inst.check(tol)?;
            let code = if out.holds { EXIT_OK } else { EXIT_REFUTED };
            let mut v = to_value(&out)?;
            if instance.is_none() {
                v["instance"] = to_value(&inst)?;
            }
            (v, code)
        }
        Command::Fuzz { inequality, instance, dim, trials, seed } => {
            let cfg = FuzzConfig::new(*dim, *trials, *seed);
            let report = match instance {
                Some(path) => {
                    let inst = load(path)?;
                    id_matches(*inequality, &inst)?;
                    fuzz_instance(&inst, &cfg, tol)?
                }
                None => fuzz(inequality.expect("clap requires --inequality without --instance"), &cfg, tol)?,
            };
            let code = if report.violation_count == 0 { EXIT_OK } else { EXIT_REFUTED };
            (to_value(&report)?, code)
        }
        Command::Falsify { instance, dim, iters, seed } => {
            let inst = load(instance)?;
            let problem = certificate_problem(&inst)?;
            let violation: Option<Violation> = falsify(&problem, *dim, *iters, *seed, tol)?;
            let code = if violation.is_some() { EXIT_REFUTED } else { EXIT_OK };
            (to_value(&serde_json::json!({ "violation": violation }))?, code)
        }
        Command::Majorize { instance } => {
            let inst = load(instance)?;
            if !matches!(inst.id(), InequalityId::MajorJensen | InequalityId::EigenBohr) {
                return Err(CliError::Usage(format!("majorize expects major_jensen or eigen_bohr, got {}", inst.id())));
            }
            let out = inst.check(tol)?;
            let code = if out.holds { EXIT_OK } else { EXIT_REFUTED };
            (to_value(&out)?, code)
        }
    };
    let report = Report {
        command: command.clone(),
        outcome,
        tolerance: *tol,
        version: env!("CARGO_PKG_VERSION"),
        input_digest: digest,
    };
    Ok((report, code))
}

/// Canonical bytes: keys sorted, shortest round-trip floats, trailing newline.
pub fn render_report(report: &Report, pretty: bool) -> Result<Vec<u8>, CliError> {
    // serde_json::Map is a BTreeMap here, so going through Value sorts keys
    let value = to_value(report)?;
    let mut bytes = if pretty { serde_json::to_vec_pretty(&value) } else { serde_json::to_vec(&value) }
        .map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes the report to `out` (or stdout); returns the byte count.
pub fn write_report(report: &Report, out: Option<&Path>, pretty: bool) -> Result<usize, CliError> {
    let bytes = render_report(report, pretty)?;
    match out {
        Some(path) => {
            fs::write(path, &bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })?
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(bytes.len())
}

pub fn run(cli: &Cli) -> i32 {
    let result = tolerance_from_env().and_then(|tol| {
        let (report, code) = execute(&cli.command, &tol)?;
        write_report(&report, cli.out.as_deref(), cli.pretty)?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bohr: {e}");
            EXIT_ERROR
        }
    }
}

/// Parses `args` and runs. Help and version exit 0; every other argument
/// error exits 1 so that 2 always means a refutation.
pub fn main_with_args<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_OK
            }
        }
    }
}
