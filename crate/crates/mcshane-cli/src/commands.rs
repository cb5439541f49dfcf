use mcshane::cluster::TwistState;
use mcshane::numerics::Rational;
use mcshane::torus::{CurveEngine, CurveSlope};
use mcshane::verify::{
    classical_comparison, collar_sweep, fuchsian_detector, gap_metric, mcshane_sum, spectrum, GapReport, SumMode,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{resolve_seed, RunConfig};
use crate::CliError;

/// Result of a command before it is written out.
pub struct Outcome {
    pub violations: Vec<String>,
    pub report: Value,
    pub csv: String,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Compute(e.to_string()))
}

fn table<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Compute(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Compute(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Compute(e.to_string()))
}

#[derive(Serialize)]
struct CsvGapRow {
    slope: String,
    word: String,
    l1: f64,
    l2: f64,
    tau: f64,
    #[serde(rename = "B1mu")]
    b1_mu: f64,
    gap: f64,
    partial_sum: f64,
}

fn gap_table(r: &GapReport) -> Result<String, CliError> {
    let rows: Vec<CsvGapRow> = r
        .rows
        .iter()
        .zip(&r.partial_sums)
        .map(|(x, p)| CsvGapRow {
            slope: x.slope.to_string(),
            word: x.word.to_string(),
            l1: x.l1,
            l2: x.l2,
            tau: x.tau,
            b1_mu: x.b1_mu,
            gap: x.gap,
            partial_sum: *p,
        })
        .collect();
    table(&rows)
}

fn sum(cfg: &RunConfig, cutoff: i64, mode: SumMode) -> Result<GapReport, CliError> {
    mcshane_sum(&cfg.seed, cutoff, mode, &cfg.options()).map_err(CliError::from)
}

fn compare_totals(a: &GapReport, b: &GapReport, tol: f64, what: &str) -> Vec<String> {
    a.convergence
        .iter()
        .zip(&b.convergence)
        .filter(|(x, y)| (x.total - y.total).abs() > tol)
        .map(|(x, y)| format!("{what} total differs at complexity {}: {} vs {}", x.complexity, x.total, y.total))
        .collect()
}

pub fn identity(cfg: &RunConfig, cutoff: i64) -> Result<Outcome, CliError> {
    let r = sum(cfg, cutoff, SumMode::Curve)?;
    let mut report = to_value(&r)?;
    if cfg.seed == TwistState::ones() {
        let c = classical_comparison(&r)?;
        report["classical"] = json!({ "total": c.classical_total, "max_term_difference": c.max_term_difference });
    }
    Ok(Outcome { violations: r.violations(cfg.tol), csv: gap_table(&r)?, report })
}

pub fn dual(cfg: &RunConfig, cutoff: i64) -> Result<Outcome, CliError> {
    let primal = sum(cfg, cutoff, SumMode::Curve)?;
    let dual = sum(cfg, cutoff, SumMode::Dual)?;
    let mut violations = dual.violations(cfg.tol);
    let mut max_pair: f64 = 0.0;
    for (p, d) in primal.rows.chunks(2).zip(dual.rows.chunks(2)) {
        max_pair = max_pair.max((p[0].gap - d[1].gap).abs()).max((p[1].gap - d[0].gap).abs());
    }
    if max_pair > cfg.term_tol {
        violations.push(format!("orientation pairing differs by {max_pair:e}"));
    }
    let report = json!({
        "dual": to_value(&dual)?,
        "primal_total": primal.total,
        "max_pairing_difference": max_pair,
    });
    Ok(Outcome { violations, csv: gap_table(&dual)?, report })
}

pub fn halfpants(cfg: &RunConfig, cutoff: i64) -> Result<Outcome, CliError> {
    let hp = sum(cfg, cutoff, SumMode::HalfPants)?;
    let curve = sum(cfg, cutoff, SumMode::Curve)?;
    let mut violations = hp.violations(cfg.tol);
    violations.extend(compare_totals(&hp, &curve, cfg.term_tol, "half-pants"));
    let mut report = to_value(&hp)?;
    report["curve_total"] = json!(curve.total);
    Ok(Outcome { violations, csv: gap_table(&hp)?, report })
}

pub fn pants(cfg: &RunConfig, cutoff: i64) -> Result<Outcome, CliError> {
    let pants = sum(cfg, cutoff, SumMode::Pants)?;
    let curve = sum(cfg, cutoff, SumMode::Curve)?;
    let mut violations = pants.violations(cfg.tol);
    let mut max_term: f64 = 0.0;
    let mut max_collapse: f64 = 0.0;
    for (p, c) in pants.rows.iter().zip(&curve.rows) {
        max_term = max_term.max((p.gap - c.gap).abs());
        if let (Some(d1), Some(e1)) = (p.d1, p.e1) {
            max_collapse = max_collapse.max((d1 + e1).abs());
        }
    }
    if max_term > cfg.term_tol {
        violations.push(format!("pants and curve terms differ by {max_term:e}"));
    }
    let mut report = to_value(&pants)?;
    report["max_term_difference"] = json!(max_term);
    report["max_d1_plus_e1"] = json!(max_collapse);
    Ok(Outcome { violations, csv: gap_table(&pants)?, report })
}

pub fn gapmetric(cfg: &RunConfig, other: &TwistState<Rational>, cutoff: i64) -> Result<Outcome, CliError> {
    let r = gap_metric(&cfg.seed, other, cutoff, &cfg.options())?;
    let mut violations = Vec::new();
    if r.d_gap < r.systole_ratio.ln() {
        violations.push("supremum below the systole ratio".into());
    }
    let csv = table(&[&r])?;
    Ok(Outcome { violations, report: to_value(&r)?, csv })
}

pub fn spectrum_cmd(cfg: &RunConfig, cutoff: i64, fit: (f64, f64)) -> Result<Outcome, CliError> {
    let r = spectrum(&cfg.seed, cutoff, fit, &cfg.options())?;
    let mut violations = Vec::new();
    if r.counting.windows(2).any(|w| w[1].count < w[0].count) {
        violations.push("counting function decreases".into());
    }
    if !(r.min_gap > 0.0) {
        violations.push("spectrum has no positive gap".into());
    }
    let mut report = to_value(&r)?;
    if r.complete_below < fit.1 {
        report["warning"] =
            json!(format!("counts above N = {:.3} may be incomplete; raise --cutoff", r.complete_below));
    }
    Ok(Outcome { violations, csv: table(&r.counting)?, report })
}

pub fn collar(cfg: &RunConfig, cutoff: i64) -> Result<Outcome, CliError> {
    let r = collar_sweep(&cfg.seed, cutoff, &cfg.options())?;
    let violations =
        if r.all_above_four { Vec::new() } else { vec![format!("collar minimum {} is not above 4", r.min)] };
    #[derive(Serialize)]
    struct Row {
        beta: String,
        gamma: String,
        lhs: f64,
    }
    let rows: Vec<Row> =
        r.pairs.iter().map(|p| Row { beta: p.beta.to_string(), gamma: p.gamma.to_string(), lhs: p.lhs }).collect();
    Ok(Outcome { violations, csv: table(&rows)?, report: to_value(&r)? })
}

pub fn fuchsian_check(cfg: &RunConfig, depth: usize, tol: f64) -> Result<Outcome, CliError> {
    let r = fuchsian_detector(&cfg.seed, depth, tol);
    Ok(Outcome { violations: Vec::new(), csv: table(&[&r])?, report: to_value(&r)? })
}

pub fn twist_orbit(
    cfg: &RunConfig,
    slope: &CurveSlope,
    iterations: usize,
    agreement: f64,
) -> Result<Outcome, CliError> {
    let engine = CurveEngine::new(cfg.seed.clone(), cfg.precision)?;
    let lim = engine.twist_limits(slope, iterations, 0.0)?;
    let logs = engine.log_spectrum(slope)?;
    let lambda1 = logs[0].exp();
    let lambda12 = (logs[0] + logs[1]).exp();
    let err1 = (lim.lambda1 / lambda1 - 1.0).abs();
    let err12 = (lim.lambda1_lambda2 / lambda12 - 1.0).abs();
    let mut violations = Vec::new();
    if err1 > agreement || err12 > agreement {
        violations.push(format!("twist limits disagree with the spectrum: {err1:e}, {err12:e}"));
    }
    #[derive(Serialize)]
    struct Row {
        step: usize,
        d: f64,
        b: f64,
        c: f64,
        e: f64,
    }
    let rows: Vec<Row> = (0..lim.d_ratios.len())
        .map(|k| Row { step: k + 1, d: lim.d_ratios[k], b: lim.b_ratios[k], c: lim.c_ratios[k], e: lim.e_ratios[k] })
        .collect();
    let report = json!({
        "slope": slope.to_string(),
        "limits": to_value(&lim)?,
        "eigen_lambda1": lambda1,
        "eigen_lambda1_lambda2": lambda12,
        "relative_error_lambda1": err1,
        "relative_error_lambda1_lambda2": err12,
    });
    Ok(Outcome { violations, csv: table(&rows)?, report })
}

pub fn other_seed(source: &str, rng_seed: u64) -> Result<TwistState<Rational>, CliError> {
    resolve_seed(source, rng_seed, 1)
}
