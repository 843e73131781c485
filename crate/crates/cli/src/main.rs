//! Command-line driver: multi-curve detuning sweeps to CSV, the oracle
//! validation suite with a JSON report, and derived-parameter inspection.
//!
//! Exit codes: 0 on success, 2 on configuration or I/O errors (single-line
//! diagnostic naming the offending key), 3 when the validation suite ran but
//! a hard check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use defbec_core::params::{derive_couplings, AtomSpec, DeformationSpec, DriveSpec, ParamFile};
use defbec_core::sweep::{run_sweep, to_csv, SweepConfig};
use defbec_core::validate;

#[derive(Parser)]
#[command(
    name = "defbec",
    version,
    about = "Dispersion of a weak probe in a collision-deformed condensate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a multi-curve detuning sweep and emit CSV.
    Sweep(SweepArgs),
    /// Run every closed form against its matrix oracle; emit a JSON report.
    Validate(ValidateArgs),
    /// Print the derived couplings of a parameter file at zero detuning.
    Info(InfoArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Parameter file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    /// Parameter file (JSON).
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Info(args) => cmd_info(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_params(path: &Path) -> Result<(AtomSpec, DriveSpec, DeformationSpec)> {
    let file = ParamFile::from_json(&read_file(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.into_specs()?)
}

fn write_or_print(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// Relative `params_file` entries resolve against the sweep config's own
/// directory, so a config can ship next to its parameter file.
fn resolve_params_path(config_path: &Path, params_file: &str) -> PathBuf {
    let p = Path::new(params_file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(p)
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let config = SweepConfig::from_json(&read_file(&args.config)?)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    config.validate()?;
    let params_path = resolve_params_path(&args.config, &config.params_file);
    let (atom, drive, deform) = load_params(&params_path)?;
    let rows = run_sweep(&atom, &drive, &deform, &config)?;
    write_or_print(&args.out, &to_csv(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: &ValidateArgs) -> Result<ExitCode> {
    let (atom, drive, deform) = load_params(&args.config)?;
    let report = validate::report(&atom, &drive, &deform);
    for c in &report.checks {
        let verdict = if c.skipped {
            "skip"
        } else if c.pass {
            "pass"
        } else {
            "FAIL"
        };
        let kind = if c.hard { "hard" } else { "soft" };
        if c.skipped {
            eprintln!("{verdict} {kind} {} ({})", c.check_name, c.reason);
        } else {
            eprintln!(
                "{verdict} {kind} {} residual {:.3e} bound {:.3e}",
                c.check_name, c.residual, c.bound
            );
        }
    }
    let mut body =
        serde_json::to_string_pretty(&report).context("serializing validation report")?;
    body.push('\n');
    write_or_print(&args.out, &body)?;
    Ok(if report.hard_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn cmd_info(args: &InfoArgs) -> Result<ExitCode> {
    let (atom, drive, deform) = load_params(&args.config)?;
    let d = derive_couplings(&atom, &drive, &deform, 0.0)?;
    let lambda_derived = d.k.norm() / (2.0 * d.omega_bar);
    println!("quantization volume V   {:.6e} m^3", d.volume);
    println!("field scale epsilon     {:.6e} V/m", d.epsilon);
    println!("bare coupling k0        {:.6e} rad/s", d.k0);
    println!(
        "transparency L_l(0)     {:.6e} {:+.6e}i (|L_l| {:.6e})",
        d.l_l.re,
        d.l_l.im,
        d.l_l.norm()
    );
    println!(
        "coupling k(0)           {:.6e} {:+.6e}i rad/s (|k| {:.6e})",
        d.k.re,
        d.k.im,
        d.k.norm()
    );
    println!(
        "collective K(0)         {:.6e} {:+.6e}i rad/s (|K| {:.6e})",
        d.k_collective.re,
        d.k_collective.im,
        d.k_collective.norm()
    );
    println!("lambda |k|/2w_bar       {:.6e}", lambda_derived);
    println!(
        "lambda in effect        {:.6e} ({:?} mode)",
        d.lambda_eff, deform.lambda_mode
    );
    Ok(ExitCode::SUCCESS)
}
