use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde_json::json;
use specfact::files::{ConfigRecord, DensityFile, FactorFile};
use specfact::testkit::gen_polynomial_instance;
use specfact::triangular::{triangular_factorize, TriangularConfig};
use specfact::{factorize::factorize_triangular, CircleGrid, ErrorKind, FactorizeConfig, HermitianTrigMatrix};

use crate::{FactorizeArgs, Format, GenArgs};

/// Failure reported as a JSON object on stdout with a matching exit code.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn invalid_input(message: String) -> Self {
        Self {
            exit_code: 2,
            kind: "invalid_input",
            message,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind, "exit_code": self.exit_code, "message": self.message } }).to_string()
    }
}

impl From<specfact::Error> for CliError {
    fn from(e: specfact::Error) -> Self {
        let (exit_code, kind) = match e.kind() {
            ErrorKind::InvalidInput => (2, "invalid_input"),
            ErrorKind::Admissibility => (3, "admissibility"),
            ErrorKind::Numerical => (4, "numerical"),
            ErrorKind::Unreachable => (5, "unreachable_target"),
        };
        Self {
            exit_code,
            kind,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::invalid_input(format!("{}: {e}", path.display())))
}

pub fn read_density(path: &Path) -> CliResult<HermitianTrigMatrix> {
    Ok(DensityFile::from_json(&read(path)?)?.to_density()?)
}

pub fn read_factor(path: &Path) -> CliResult<FactorFile> {
    Ok(FactorFile::from_json(&read(path)?)?)
}

/// Writes through a temporary file in the target directory, renamed on success.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |e: std::io::Error| CliError {
        exit_code: 2,
        kind: "io",
        message: format!("{}: {e}", path.display()),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: String) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, &contents),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

pub fn factorize(args: &FactorizeArgs) -> CliResult<ExitCode> {
    let density = read_density(&args.input)?;
    let grid = CircleGrid::new(args.grid)?;
    let mut config = FactorizeConfig::default();
    config.completion.tol_unitary = args.tol;
    config.triangular = TriangularConfig {
        phi_band: args.phi_band,
        ..config.triangular
    };
    let t = triangular_factorize(&density, grid, &config.triangular)?;
    let n = match (args.n, args.target) {
        (Some(n), _) => n,
        (None, Some(target)) => {
            let n_max = t.phi_band.min(grid.max_band().saturating_sub(t.order));
            specfact::factorize::choose_order(&t, target, n_max)?
        }
        (None, None) => unreachable!("clap requires --n or --target"),
    };
    let x = factorize_triangular(&t, n, &config)?;
    let file = FactorFile::from_factor(&x, ConfigRecord::new(grid.size(), t.phi_band, &config));
    let text = match args.format {
        Format::Json => file.to_json(),
        Format::Csv => file.to_csv(),
    };
    emit(args.out.as_deref(), text)?;
    Ok(ExitCode::SUCCESS)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("exact.json")
}

pub fn gen(args: &GenArgs) -> CliResult<ExitCode> {
    let inst = gen_polynomial_instance(args.degree, args.seed);
    let mut density = DensityFile::from_density(&inst.density);
    density.seed = Some(args.seed);
    let factor = FactorFile::from_instance(&inst);
    let factor_path = args.factor_out.clone().unwrap_or_else(|| sidecar_path(&args.out));
    write_atomic(&args.out, &density.to_json())?;
    write_atomic(&factor_path, &factor.to_json())?;
    println!(
        "{}",
        json!({ "density": args.out.display().to_string(), "factor": factor_path.display().to_string() })
    );
    Ok(ExitCode::SUCCESS)
}
