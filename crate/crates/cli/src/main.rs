//! `lie-hermitian`: checks, tensor dumps, classification, sample suites and
//! the acceptance battery over JSON spec files.
//!
//! Exit codes: 0 success (including a NotBTP answer), 1 other failure,
//! 2 unreadable or malformed input, 3 integrability or Jacobi violation,
//! 4 cross-check failure or a failing acceptance criterion.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lie_hermitian::hermitian::mutation::{self, Mutation};
use lie_hermitian::spec_file::SpecFile;
use lie_hermitian::suite::{run_suite, SuiteFamily, SuiteOptions};
use lie_hermitian::verify::{self, VerifyOptions};
use lie_hermitian::{commands, report, Error};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "lie-hermitian", version, about = "Left-invariant Hermitian geometry on Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance override for every comparison.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Base seed for sampled runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format; `verify-paper` defaults to text, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Property report and family closed forms for a spec file.
    Check {
        spec: PathBuf,
        /// Also classify codim-2 data.
        #[arg(long)]
        classify: bool,
    },
    /// Sparse dump of C, D, T, R, the Ricci matrices, eta, zeta and scalars.
    Tensors { spec: PathBuf },
    /// Normal-form classification of BTP codim-2 data.
    Classify { spec: PathBuf },
    /// Runs the seeded sample suite of a family.
    Sample {
        /// One of almost_abelian, codim2, btpv1, btpv2, btpv0, general.
        family: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Directory for one reproducing spec file per failed check.
        #[arg(long)]
        repro_dir: Option<PathBuf>,
    },
    /// Runs the acceptance battery; exits 0 iff every selected criterion passes.
    VerifyPaper {
        /// Criterion id (c1..c13) or tag such as prop5 or lemma9.
        #[arg(long)]
        filter: Option<String>,
        /// Runs under a sign mutation: torsion-sign or curvature-sign.
        #[arg(long, hide = true)]
        mutate: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// A failure with its exit code and a JSON payload for stderr.
struct Failure {
    code: u8,
    payload: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_)
            | Error::ParameterDomain(_)
            | Error::InvalidDimension { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DuplicateEntry { .. }
            | Error::AntisymmetryViolation { .. }
            | Error::NonFinite(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidDegree { .. }
            | Error::PatternMismatch { .. }
            | Error::NegativeLambda(_)
            | Error::NotUnimodular(_) => 2,
            Error::IntegrabilityViolation { .. } | Error::InvalidAlgebra { .. } => 3,
            Error::CrossCheckFailure { .. } => 4,
            _ => 1,
        };
        let mut payload = json!({"error": kind(&e), "message": e.to_string()});
        match e {
            Error::IntegrabilityViolation { first, second, first_matrix, second_matrix } => {
                payload["first_residual"] = json!(first);
                payload["second_residual"] = json!(second);
                payload["first_matrix"] = json!(first_matrix);
                payload["second_matrix"] = json!(second_matrix);
            }
            Error::InvalidAlgebra { residual } => payload["jacobi_residual"] = json!(residual),
            Error::CrossCheckFailure { property, closed, engine, residual } => {
                payload["property"] = json!(property);
                payload["closed_form"] = json!(closed);
                payload["engine"] = json!(engine);
                payload["residual"] = json!(residual);
            }
            _ => {}
        }
        Failure { code, payload }
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::IntegrabilityViolation { .. } => "integrability",
        Error::InvalidAlgebra { .. } => "jacobi",
        Error::CrossCheckFailure { .. } => "cross_check",
        Error::NotUnimodular(_) => "not_unimodular",
        Error::Numerical(_) => "numerical",
        _ => "invalid_input",
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, payload: json!({"error": "io", "message": format!("{}: {e}", path.display())}) }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.payload);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Check { spec, classify } => {
            let v = commands::check(&read_spec(spec)?, cli.tol, *classify)?;
            emit(cli, format.unwrap_or(Format::Json), &v)?;
            Ok(0)
        }
        Command::Tensors { spec } => {
            let v = commands::tensors(&read_spec(spec)?, cli.tol)?;
            emit(cli, format.unwrap_or(Format::Json), &v)?;
            Ok(0)
        }
        Command::Classify { spec } => {
            let v = commands::classify(&read_spec(spec)?, cli.tol)?;
            emit(cli, format.unwrap_or(Format::Json), &v)?;
            Ok(0)
        }
        Command::Sample { family, count, repro_dir } => {
            let family = SuiteFamily::parse(family)?;
            let rep = run_suite(&SuiteOptions { family, count: *count, seed: cli.seed, tol: cli.tol })?;
            if let Some(dir) = repro_dir {
                fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
                for f in &rep.failures {
                    let path = dir.join(rep.repro_name(f));
                    fs::write(&path, report::to_json(&f.spec)).map_err(|e| io_failure(&path, e))?;
                }
            }
            let mut v = rep.to_value(cli.tol);
            v["repro_dir"] = json!(repro_dir.as_ref().map(|d| d.display().to_string()));
            emit(cli, format.unwrap_or(Format::Json), &v)?;
            Ok(0)
        }
        Command::VerifyPaper { filter, mutate } => {
            let opts = VerifyOptions { seed: cli.seed, tol: cli.tol, filter: filter.clone() };
            let results = match mutate {
                None => verify::run(&opts),
                Some(name) => {
                    let m =
                        Mutation::parse(name).ok_or_else(|| Error::Parse(format!("unknown mutation \"{name}\"")))?;
                    mutation::with(m, || verify::run(&opts))
                }
            };
            if results.is_empty() {
                return Err(
                    Error::Parse(format!("filter {:?} selects no criterion", filter.as_deref().unwrap_or(""))).into()
                );
            }
            match format.unwrap_or(Format::Text) {
                Format::Json => write_out(cli, &report::to_json(&verify::results_json(&results, &opts)))?,
                Format::Text => {
                    let mut table: String = results.iter().map(|r| r.line() + "\n").collect();
                    let failed = results.iter().filter(|r| !r.passed).count();
                    table.push_str(&format!("{} of {} criteria passed\n", results.len() - failed, results.len()));
                    write_out(cli, &table)?;
                }
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 4 })
        }
    }
}

fn read_spec(path: &Path) -> Result<SpecFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(SpecFile::parse(&text)?)
}

fn emit(cli: &Cli, format: Format, v: &Value) -> Result<(), Failure> {
    let text = match format {
        Format::Json => report::to_json(v),
        Format::Text => report::to_text(v),
    };
    write_out(cli, &text)
}

fn write_out(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}
