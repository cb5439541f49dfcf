//! `mcshane`: verification workflows for McShane-type identities of positive PGL3 structures on
//! the once-punctured torus. Exit codes: 0 pass, 1 invariant violation, 2 usage or input error.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcshane::torus::CurveSlope;
use serde_json::json;

use config::{resolve, Common};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or configuration.
    Input(String),
    /// A computation failed on valid input.
    Compute(String),
}

impl From<mcshane::Error> for CliError {
    fn from(e: mcshane::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "mcshane", version, about = "Verify McShane-type identities for positive PGL3 structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partial sums of the curve form of the identity.
    Identity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
    },
    /// Partial sums of the dual form, paired with the curve form by orientation.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
    },
    /// Partial sums of the half-pants form.
    Halfpants {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
    },
    /// Partial sums of the pants form with edge functions computed from flags.
    Pants {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        cutoff: i64,
    },
    /// Finite-cutoff gap metric between `--seed` and `--other`.
    Gapmetric {
        #[command(flatten)]
        common: Common,
        /// Second chart, same syntax as `--seed`.
        #[arg(long)]
        other: String,
        #[arg(long, default_value_t = 20)]
        cutoff: i64,
    },
    /// Length spectra and growth of the counting function.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 28)]
        cutoff: i64,
        #[arg(long, default_value_t = 6.0)]
        fit_lo: f64,
        #[arg(long, default_value_t = 14.0)]
        fit_hi: f64,
    },
    /// Collar inequality over all pairs of distinct curves.
    Collar {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        cutoff: i64,
    },
    /// Triple-ratio rigidity test over nearby triangulations.
    FuchsianCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Allowed deviation of triple ratios from 1.
        #[arg(long, default_value_t = 1e-9)]
        rigidity_tol: f64,
    },
    /// Ratio sequences of repeated twists along a curve.
    TwistOrbit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0/1+", allow_hyphen_values = true)]
        slope: String,
        #[arg(long, default_value_t = 60)]
        iterations: usize,
        /// Allowed relative disagreement with the eigenvalues.
        #[arg(long, default_value_t = 1e-6)]
        agreement: f64,
    },
}

type SumCommand = fn(&config::RunConfig, i64) -> Result<commands::Outcome, CliError>;

fn check_cutoff(cutoff: i64) -> Result<(), CliError> {
    if cutoff < 1 {
        return Err(CliError::Input(format!("--cutoff must be at least 1, got {cutoff}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (common, cfg, outcome) = match &cli.command {
        Command::Identity { common, cutoff }
        | Command::Dual { common, cutoff }
        | Command::Halfpants { common, cutoff }
        | Command::Pants { common, cutoff } => {
            check_cutoff(*cutoff)?;
            let (name, f): (&str, SumCommand) = match &cli.command {
                Command::Identity { .. } => ("identity", commands::identity),
                Command::Dual { .. } => ("dual", commands::dual),
                Command::Halfpants { .. } => ("halfpants", commands::halfpants),
                _ => ("pants", commands::pants),
            };
            let cfg = resolve(name, common, json!({ "cutoff": cutoff }))?;
            let out = f(&cfg, *cutoff)?;
            (common, cfg, out)
        }
        Command::Gapmetric { common, other, cutoff } => {
            check_cutoff(*cutoff)?;
            let other_state = commands::other_seed(other, common.rng_seed)?;
            let cfg =
                resolve("gapmetric", common, json!({ "cutoff": cutoff, "other": other, "other_seed": other_state }))?;
            let out = commands::gapmetric(&cfg, &other_state, *cutoff)?;
            (common, cfg, out)
        }
        Command::Spectrum { common, cutoff, fit_lo, fit_hi } => {
            if *cutoff < 2 || !(*fit_lo > 0.0 && fit_hi > fit_lo) {
                return Err(CliError::Input("spectrum needs --cutoff >= 2 and 0 < --fit-lo < --fit-hi".into()));
            }
            let cfg = resolve("spectrum", common, json!({ "cutoff": cutoff, "fit_lo": fit_lo, "fit_hi": fit_hi }))?;
            let out = commands::spectrum_cmd(&cfg, *cutoff, (*fit_lo, *fit_hi))?;
            (common, cfg, out)
        }
        Command::Collar { common, cutoff } => {
            check_cutoff(*cutoff)?;
            let cfg = resolve("collar", common, json!({ "cutoff": cutoff }))?;
            let out = commands::collar(&cfg, *cutoff)?;
            (common, cfg, out)
        }
        Command::FuchsianCheck { common, depth, rigidity_tol } => {
            if !(*rigidity_tol > 0.0) {
                return Err(CliError::Input("--rigidity-tol must be positive".into()));
            }
            let cfg = resolve("fuchsian-check", common, json!({ "depth": depth, "rigidity_tol": rigidity_tol }))?;
            let out = commands::fuchsian_check(&cfg, *depth, *rigidity_tol)?;
            (common, cfg, out)
        }
        Command::TwistOrbit { common, slope, iterations, agreement } => {
            let s: CurveSlope = slope.parse().map_err(|e: mcshane::Error| CliError::Input(e.to_string()))?;
            if *iterations < 2 || !(*agreement > 0.0) {
                return Err(CliError::Input("--iterations must be >= 2 and --agreement positive".into()));
            }
            let cfg = resolve(
                "twist-orbit",
                common,
                json!({ "slope": s.to_string(), "iterations": iterations, "agreement": agreement }),
            )?;
            let out = commands::twist_orbit(&cfg, &s, *iterations, *agreement)?;
            (common, cfg, out)
        }
    };

    let passed = outcome.violations.is_empty();
    let text = if common.csv {
        outcome.csv
    } else {
        let envelope = json!({
            "schema_version": SCHEMA_VERSION,
            "library_version": mcshane::VERSION,
            "command": cfg.command,
            "config": cfg,
            "passed": passed,
            "violations": outcome.violations,
            "report": outcome.report,
        });
        let mut s = serde_json::to_string_pretty(&envelope).map_err(|e| CliError::Compute(e.to_string()))?;
        s.push('\n');
        s
    };
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", path.display())))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Compute(e.to_string()))?,
    }
    for v in &outcome.violations {
        eprintln!("violation: {v}");
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
