use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use densparam::Tolerances;

use crate::error::{CliError, CliResult, EXIT_MISMATCH, EXIT_NOT_STATE, EXIT_OK};
use crate::matrix_io::{parse_matrix_file, to_matrix_text, to_rows, MatrixDoc};
use crate::params::ParamFile;
use crate::report::analyze_matrix;
use crate::reproduce::{reproduce, EXAMPLES};
use crate::sweep::{parse_fixed, write_csv, Axis, SweepPlan};
use crate::validate::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    #[value(name = "matrix_text", alias = "matrix-text")]
    MatrixText,
}

/// Build and analyze density matrices from eigenvalues and rotation parameters.
#[derive(Debug, Parser)]
#[command(name = "densparam", version)]
pub struct Cli {
    /// Most negative eigenvalue still accepted as positive semidefinite.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_psd: f64,
    /// Admissible relative Hermiticity deviation.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_herm: f64,
    /// Seed for commands that draw random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Matrix output format of `generate`.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble the density matrix described by a parameter file.
    Generate {
        /// Parameter file (JSON).
        input: PathBuf,
    },
    /// Report spectrum, purity, rank, PPT verdict and block structure.
    Analyze {
        /// Matrix file: `generate` JSON output, a JSON array of rows, or matrix text.
        input: PathBuf,
        /// Dimension of the first factor.
        #[arg(long)]
        n: Option<usize>,
        /// Dimension of the second factor.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Recompute a worked example and check it.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXAMPLES))]
        example: String,
    },
    /// Evaluate a family over a parameter grid and write CSV.
    Sweep {
        /// pure_P, isotropic, isotropic_alpha, circulant or bell_diagonal.
        #[arg(long)]
        family: String,
        /// Grid axis as name=start:stop:count; repeat for more axes.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// Fixed parameter as name=value.
        #[arg(long = "fixed")]
        fixed: Vec<String>,
    },
    /// Run the invariant suite on seeded random inputs.
    Validate {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn tolerances(cli: &Cli) -> CliResult<Tolerances> {
    let d = Tolerances::default();
    Tolerances::new(cli.tol_herm, cli.tol_psd, d.unitary, d.recon)
        .map_err(|e| CliError::input(format!("tolerances: {e}")))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))
}

fn emit(cli: &Cli, out: &mut dyn Write, text: &str) -> CliResult<()> {
    let res = match &cli.output {
        Some(path) => fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    };
    res.map_err(|e| CliError::input(format!("output: {e}")))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs one command and returns its exit code. Errors are reported on stderr.
pub fn run(cli: &Cli, out: &mut dyn Write) -> u8 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<u8> {
    let tol = tolerances(cli)?;
    match &cli.command {
        Command::Generate { input } => {
            let file = ParamFile::parse(&read(input)?)?;
            let rho = file.generate(&tol)?.rho;
            let (n, m) = rho.factorization().unwrap_or((rho.dim(), 1));
            let text = match cli.format {
                OutputFormat::Json => to_json(&MatrixDoc {
                    dims: (n, m),
                    matrix: to_rows(rho.matrix()),
                }),
                OutputFormat::MatrixText => to_matrix_text(rho.matrix()),
            };
            emit(cli, out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Analyze { input, n, m } => {
            let loaded = parse_matrix_file(&read(input)?)?;
            let dim = loaded.matrix.nrows();
            let (n, m) = match (n, m, loaded.dims) {
                (Some(n), Some(m), _) => (*n, *m),
                (Some(n), None, _) if *n > 0 && dim % n == 0 => (*n, dim / n),
                (None, Some(m), _) if *m > 0 && dim % m == 0 => (dim / m, *m),
                (None, None, Some(dims)) => dims,
                (None, None, None) => (dim, 1),
                _ => {
                    return Err(CliError::input(format!(
                        "--n/--m: do not divide the matrix dimension {dim}"
                    )))
                }
            };
            let report = analyze_matrix(&loaded.matrix, n, m, &tol)?;
            emit(cli, out, &to_json(&report))?;
            if report.valid_state {
                Ok(EXIT_OK)
            } else {
                eprintln!("error: not a state: {}", report.diagnostics.join("; "));
                Ok(EXIT_NOT_STATE)
            }
        }
        Command::Reproduce { example } => {
            let r = reproduce(example, cli.seed, &tol)?;
            let mut text = r.log.clone();
            for c in &r.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{mark} {}", c.name));
                if !c.detail.is_empty() {
                    text.push_str(&format!(" ({})", c.detail));
                }
                text.push('\n');
            }
            emit(cli, out, &text)?;
            match r.checks.iter().find(|c| !c.passed) {
                None => Ok(EXIT_OK),
                Some(c) => {
                    eprintln!("error: check failed: {}", c.name);
                    Ok(EXIT_MISMATCH)
                }
            }
        }
        Command::Sweep {
            family,
            axes,
            fixed,
        } => {
            let plan = SweepPlan::new(
                family.parse()?,
                axes.iter()
                    .map(|a| Axis::parse(a))
                    .collect::<CliResult<_>>()?,
                fixed
                    .iter()
                    .map(|f| parse_fixed(f))
                    .collect::<CliResult<_>>()?,
            )?;
            let rows = plan.run(&tol);
            let mut buf = Vec::new();
            write_csv(&plan, &rows, &mut buf)?;
            emit(cli, out, &String::from_utf8(buf).expect("CSV is UTF-8"))?;
            Ok(EXIT_OK)
        }
        Command::Validate { trials } => {
            let v = validate(cli.seed, *trials, &tol)?;
            let mut text = v.log.clone();
            if let Some(ce) = &v.failure {
                text.push_str("counterexample:\n");
                text.push_str(&to_json(ce));
            }
            emit(cli, out, &text)?;
            match v.failure {
                None => Ok(EXIT_OK),
                Some(ce) => Err(CliError::mismatch(format!(
                    "invariant {} failed at trial {}",
                    ce.invariant, ce.trial
                ))),
            }
        }
    }
}
