//! The `contnorm` command-line front end.
//!
//! All physics lives in the config file; flags only choose paths and formats.
//!
//! Exit codes: 0 success, 1 a verification block missed its tolerance,
//! 2 usage or configuration error, 3 numerical failure (a propagation or a
//! verification run errored), 4 I/O error.

pub mod config;
pub mod emit;
pub mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::integrator::Parity;
use crate::matching::extend_samples;
use crate::overlap::{degeneracy_threshold, overlap_equal_k, overlap_quadrature, overlap_wronskian};
use crate::propagate;

pub use config::{parse_config, ConfigError, Format, RunConfig};
pub use emit::{emit_reports, emit_rows};
pub use sweep::{run_sweep, SweepOutcome, SweepRow, Verification};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationFailed = 1,
    ConfigError = 2,
    NumericalFailure = 3,
    IoError = 4,
}

#[derive(Debug, Parser)]
#[command(name = "contnorm", version, about = "Continuum normalization of 1D scattering states (units: hbar = 1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate |A|, phase, normalization constant and δ-strength over the k-grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Sweep table destination (defaults to the config's output.path, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Where to write the verification reports, if any blocks are configured.
        #[arg(long)]
        reports: Option<PathBuf>,
    },
    /// Run only the verification blocks of the config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Overlap of two states by Wronskian boundary terms and by quadrature.
    Overlap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        kprime: f64,
        #[arg(long, allow_hyphen_values = true)]
        x1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x2: Option<f64>,
    },
}

/// Parses `args` and runs the selected command, returning the process exit code.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdout, stderr) as i32,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            if e.use_stderr() {
                ExitStatus::ConfigError as i32
            } else {
                let _ = write!(stdout, "{e}");
                ExitStatus::Success as i32
            }
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus {
    let result = match cli.command {
        Command::Sweep {
            config,
            out,
            format,
            reports,
        } => cmd_sweep(&config, out, format.map(Into::into), reports, stdout, stderr),
        Command::Verify { config, out, format } => cmd_verify(&config, out, format.map(Into::into), stdout),
        Command::Overlap {
            config,
            k,
            kprime,
            x1,
            x2,
        } => cmd_overlap(&config, k, kprime, x1, x2, stdout),
    };
    match result {
        Ok(status) => status,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.status
        }
    }
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            status: ExitStatus::IoError,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::ConfigError,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::NumericalFailure,
            message: message.into(),
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    parse_config(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn write_to(path: Option<&Path>, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::io(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::io(p, e))
        }
        None => body(stdout).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn print_verifications(out: &mut dyn Write, verifications: &[Verification]) -> std::io::Result<()> {
    for v in verifications {
        match &v.result {
            Ok(r) => writeln!(
                out,
                "{:<13} {}  measured={:.10e} expected={:.10e} relative_error={:.3e} tolerance={}",
                v.name,
                if v.passed() { "PASS" } else { "FAIL" },
                r.measured,
                r.expected,
                sweep::error_vs_peak(r),
                v.tolerance
            )?,
            Err(e) => writeln!(out, "{:<13} ERROR {e}", v.name)?,
        }
    }
    Ok(())
}

fn verification_status(verifications: &[Verification]) -> ExitStatus {
    if verifications.iter().any(|v| v.result.is_err()) {
        ExitStatus::NumericalFailure
    } else if verifications.iter().all(Verification::passed) {
        ExitStatus::Success
    } else {
        ExitStatus::VerificationFailed
    }
}

fn cmd_sweep(
    path: &Path,
    out: Option<PathBuf>,
    format: Option<Format>,
    reports: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<ExitStatus, Failure> {
    let config = load(path)?;
    if config.k_grid.is_none() {
        return Err(Failure::config(format!("{}: sweep needs a [k_grid] table", path.display())));
    }
    let format = format.or(config.outputs.format).unwrap_or_default();
    let out = out.or_else(|| config.outputs.path.clone());

    let outcome = run_sweep(&config);
    write_to(out.as_deref(), stdout, |w| emit_rows(w, &outcome.rows, format))?;
    if let Some(p) = &reports {
        write_to(Some(p), stdout, |w| emit_reports(w, &outcome.verifications, format))?;
    }

    for f in &outcome.failures {
        let _ = writeln!(stderr, "propagation failed at k = {} ({}): {}", f.k, f.parity, f.error);
    }
    let summary: &mut dyn Write = if out.is_some() { stdout } else { stderr };
    print_verifications(summary, &outcome.verifications).map_err(|e| Failure::io(Path::new("<stdout>"), e))?;

    if !outcome.failures.is_empty() {
        return Ok(ExitStatus::NumericalFailure);
    }
    Ok(verification_status(&outcome.verifications))
}

fn cmd_verify(path: &Path, out: Option<PathBuf>, format: Option<Format>, stdout: &mut dyn Write) -> Result<ExitStatus, Failure> {
    let config = load(path)?;
    let verifications = sweep::run_verifications(&config);
    if verifications.is_empty() {
        let _ = writeln!(stdout, "no verification blocks in {}", path.display());
    }
    print_verifications(stdout, &verifications).map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
    if let Some(p) = &out {
        let format = format.or(config.outputs.format).unwrap_or_default();
        write_to(Some(p), stdout, |w| emit_reports(w, &verifications, format))?;
    }
    Ok(verification_status(&verifications))
}

fn cmd_overlap(
    path: &Path,
    k: f64,
    kprime: f64,
    x1: Option<f64>,
    x2: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<ExitStatus, Failure> {
    let config = load(path)?;
    if !(k > 0.0 && kprime > 0.0 && k.is_finite() && kprime.is_finite()) {
        return Err(Failure::config("--k and --kprime must be finite and > 0"));
    }
    let (xa, xb) = config.potential.support();
    let (x1, x2) = (x1.unwrap_or(xa), x2.unwrap_or(xb));
    if x1 == x2 {
        return Err(Failure::config(
            "empty interval: the potential has no support, pass --x1 and --x2",
        ));
    }
    let reach = x1.abs().max(x2.abs());
    let numerical = |e: crate::Error| Failure::numerical(e.to_string());

    let mut lines = Vec::new();
    lines.push(format!(
        "# {} potential, interval [{x1}, {x2}], k = {k}, k' = {kprime}",
        config.potential.kind_name()
    ));
    lines.push("parity  wronskian                quadrature               abs_diff".to_string());
    for &parity in config.parity.parities() {
        let states = [k, kprime].map(|kk| {
            propagate(&config.potential, kk, parity, &config.solver).and_then(|s| extend_samples(&s, reach))
        });
        let [a, b] = states;
        let (a, b) = (a.map_err(numerical)?, b.map_err(numerical)?);
        let quad = overlap_quadrature(&a, &b, x1, x2).map_err(numerical)?.value;
        let line = if (k - kprime).abs() < degeneracy_threshold(k, kprime) {
            let eq = overlap_equal_k(&a, x1, x2).map_err(numerical)?.value;
            format!("{:<7} {:<24} {:<24.16e} (equal-k limit {eq:.16e})", parity_label(parity), "degenerate", quad)
        } else {
            let w = overlap_wronskian(&a, &b, x1, x2).map_err(numerical)?.value;
            format!("{:<7} {:<24.16e} {:<24.16e} {:.3e}", parity_label(parity), w, quad, (w - quad).abs())
        };
        lines.push(line);
    }
    for l in lines {
        writeln!(stdout, "{l}").map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
    }
    Ok(ExitStatus::Success)
}

fn parity_label(p: Parity) -> &'static str {
    p.name()
}
