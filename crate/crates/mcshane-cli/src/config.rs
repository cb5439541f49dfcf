use std::path::PathBuf;

use clap::Args;
use mcshane::cluster::TwistState;
use mcshane::exec::Exec;
use mcshane::numerics::{parse_rational, rational, Precision, Rational};
use mcshane::verify::VerifyOptions;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::CliError;

/// Lower end of the coordinate range of random charts.
pub const RANDOM_LO: (i64, i64) = (1, 3);
/// Upper end of the coordinate range of random charts.
pub const RANDOM_HI: (i64, i64) = (3, 1);
/// Largest denominator of random coordinates.
pub const RANDOM_MAX_DEN: i64 = 12;

/// Options shared by every command.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Chart: `fuchsian`, `fuchsian:x,y,z` (lambda lengths), `random`, inline JSON, or a JSON file.
    #[arg(long, default_value = "fuchsian")]
    pub seed: String,
    /// RNG seed used when `--seed random`.
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Worker threads for per-curve work; 0 uses all cores, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the main table as CSV instead of the JSON report.
    #[arg(long)]
    pub csv: bool,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Tolerance for the bound `total ≤ 1 + tol`.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Tolerance for termwise comparisons between two forms of an identity.
    #[arg(long, default_value_t = 1e-10)]
    pub term_tol: f64,
    /// `double` or `extended`; defaults to the MCSHANE_PRECISION environment variable.
    #[arg(long)]
    pub precision: Option<String>,
}

/// Fully resolved configuration, embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed_source: String,
    pub rng_seed: u64,
    pub seed: TwistState<Rational>,
    pub jobs: usize,
    pub precision: Precision,
    pub tol: f64,
    pub term_tol: f64,
    pub format: &'static str,
    pub params: serde_json::Value,
}

impl RunConfig {
    pub fn options(&self) -> VerifyOptions {
        VerifyOptions { exec: Exec::from_jobs(self.jobs), precision: self.precision }
    }
}

fn rat(p: (i64, i64)) -> Rational {
    rational(p.0, p.1)
}

/// Parses a chart description; `salt` perturbs the RNG stream for a second random chart.
pub fn resolve_seed(source: &str, rng_seed: u64, salt: u64) -> Result<TwistState<Rational>, CliError> {
    let source = source.trim();
    if source == "fuchsian" {
        return Ok(TwistState::ones());
    }
    if let Some(rest) = source.strip_prefix("fuchsian:") {
        let parts: Vec<Rational> = rest
            .split(',')
            .map(|p| parse_rational(p.trim()).ok_or_else(|| CliError::Input(format!("bad lambda length `{p}`"))))
            .collect::<Result<_, _>>()?;
        let [x, y, z] = parts.as_slice() else {
            return Err(CliError::Input("fuchsian:x,y,z needs three lambda lengths".into()));
        };
        return TwistState::fuchsian(x, y, z).map_err(|e| CliError::Input(e.to_string()));
    }
    if source == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.wrapping_add(salt));
        return TwistState::random(&mut rng, &rat(RANDOM_LO), &rat(RANDOM_HI), RANDOM_MAX_DEN)
            .map_err(|e| CliError::Input(e.to_string()));
    }
    let text = if source.starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source)
            .map_err(|e| CliError::Input(format!("cannot read seed file `{source}`: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed seed: {e}")))
}

pub fn resolve(command: &str, common: &Common, params: serde_json::Value) -> Result<RunConfig, CliError> {
    for (name, v) in [("tol", common.tol), ("term-tol", common.term_tol)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Input(format!("--{name} must be positive, got {v}")));
        }
    }
    let precision = match &common.precision {
        Some(p) => Precision::parse(p),
        None => Precision::from_env(),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(RunConfig {
        command: command.to_string(),
        seed_source: common.seed.clone(),
        rng_seed: common.rng_seed,
        seed: resolve_seed(&common.seed, common.rng_seed, 0)?,
        jobs: common.jobs,
        precision,
        tol: common.tol,
        term_tol: common.term_tol,
        format: if common.csv { "csv" } else { "json" },
        params,
    })
}
