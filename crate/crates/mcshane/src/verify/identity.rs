use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cluster::TwistState;
use crate::error::{Error, Result};
use crate::numerics::{rational_to_string, CompensatedSum, Rational, DEFAULT_BITS};
use crate::torus::{
    dual_gap_term, enumerate_curves, gap_term, halfpants_gap_term, halfpants_gap_term_prime, pants_gap_term,
    slope_to_word, CurveEngine, CurveInvariants, CurveSlope, CurveWord,
};

use super::VerifyOptions;

/// Which form of the identity is summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumMode {
    /// `1/(1 + e^{ℓ₁+τ})` per oriented curve.
    Curve,
    /// `1/(1 + e^{ℓ₂−τ})` per oriented curve.
    Dual,
    /// Both half-pants terms `B₁μ/(1 + e^{ℓ₁+τ})`, `B₁μ′/(1 + e^{ℓ₁+τ})` per oriented curve.
    HalfPants,
    /// The pants summand with `d₁`, `e₁` computed from flags.
    Pants,
}

impl SumMode {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "curve" => Ok(SumMode::Curve),
            "dual" => Ok(SumMode::Dual),
            "half-pants" | "halfpants" => Ok(SumMode::HalfPants),
            "pants" => Ok(SumMode::Pants),
            other => Err(Error::InvalidInput(format!("unknown summation mode `{other}`"))),
        }
    }
}

/// One oriented curve and its contribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub slope: CurveSlope,
    pub word: CurveWord,
    pub l1: f64,
    pub l2: f64,
    pub tau: f64,
    #[serde(rename = "B1mu")]
    pub b1_mu: f64,
    #[serde(rename = "B1mu_prime")]
    pub b1_mu_prime: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    pub gap: f64,
}

impl GapRow {
    pub fn invariants(&self) -> CurveInvariants {
        CurveInvariants { l1: self.l1, l2: self.l2, tau: self.tau, b1_mu: self.b1_mu, b1_mu_prime: self.b1_mu_prime }
    }
}

/// Running total after all curves of a given complexity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub complexity: i64,
    pub total: f64,
    pub residual: f64,
}

/// Partial sums of a McShane-type identity in enumeration order.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub fingerprint: String,
    pub seed: TwistState<Rational>,
    pub cutoff: i64,
    pub mode: SumMode,
    pub rows: Vec<GapRow>,
    pub partial_sums: Vec<f64>,
    pub convergence: Vec<ConvergencePoint>,
    pub total: f64,
    pub residual: f64,
}

impl GapReport {
    /// Broken invariants: non-positive terms, decreasing partial sums, or a total above `1 + tol`.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !(r.gap > 0.0) {
                out.push(format!("term of {} is not positive: {}", r.slope, r.gap));
            }
        }
        for (k, w) in self.partial_sums.windows(2).enumerate() {
            if w[1] < w[0] {
                out.push(format!("partial sum decreases at row {}: {} -> {}", k + 1, w[0], w[1]));
            }
        }
        if self.total > 1.0 + tol {
            out.push(format!("total {} exceeds 1 + {tol:e}", self.total));
        }
        out
    }
}

/// SHA-256 of the canonical coordinate string of a chart.
pub fn seed_fingerprint(st: &TwistState<Rational>) -> String {
    let text = st.coords().iter().map(rational_to_string).collect::<Vec<_>>().join(",");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Working precision for flag computations along a curve with lengths `ℓ₁`, `ℓ₂`.
pub fn bits_for(inv: &CurveInvariants) -> usize {
    DEFAULT_BITS + (3.0 * (inv.l1 + inv.l2) / std::f64::consts::LN_2).ceil() as usize
}

fn row(engine: &CurveEngine, s: &CurveSlope, mode: SumMode) -> Result<GapRow> {
    let inv = engine.invariants(s)?;
    let (mut d1, mut e1) = (None, None);
    let gap = match mode {
        SumMode::Curve => gap_term(&inv),
        SumMode::Dual => dual_gap_term(&inv),
        SumMode::HalfPants => halfpants_gap_term(&inv) + halfpants_gap_term_prime(&inv),
        SumMode::Pants => {
            let pc = engine.pants_coordinates(s, bits_for(&inv))?;
            d1 = Some(pc.d1);
            e1 = Some(pc.e1);
            pants_gap_term(inv.l1, inv.tau, inv.l1, inv.tau, pc.d1, pc.e1)
        }
    };
    Ok(GapRow {
        slope: *s,
        word: slope_to_word(s),
        l1: inv.l1,
        l2: inv.l2,
        tau: inv.tau,
        b1_mu: inv.b1_mu,
        b1_mu_prime: inv.b1_mu_prime,
        d1,
        e1,
        gap,
    })
}

/// Rows for every oriented curve up to `cutoff`, in enumeration order.
pub fn curve_rows(engine: &CurveEngine, cutoff: i64, mode: SumMode, opts: &VerifyOptions) -> Result<Vec<GapRow>> {
    let slopes = enumerate_curves(cutoff);
    opts.exec.map(&slopes, |s| row(engine, s, mode)).into_iter().collect()
}

/// Assembles partial sums from rows; single-threaded and order-fixed.
pub fn assemble(st: &TwistState<Rational>, cutoff: i64, mode: SumMode, rows: Vec<GapRow>) -> GapReport {
    let mut acc = CompensatedSum::new();
    let mut partial_sums = Vec::with_capacity(rows.len());
    let mut convergence = Vec::new();
    for (k, r) in rows.iter().enumerate() {
        acc.add(r.gap);
        partial_sums.push(acc.value());
        let c = r.slope.complexity();
        if rows.get(k + 1).is_none_or(|next| next.slope.complexity() != c) {
            convergence.push(ConvergencePoint { complexity: c, total: acc.value(), residual: 1.0 - acc.value() });
        }
    }
    let total = acc.value();
    GapReport {
        fingerprint: seed_fingerprint(st),
        seed: st.clone(),
        cutoff,
        mode,
        rows,
        partial_sums,
        convergence,
        total,
        residual: 1.0 - total,
    }
}

/// Partial sums of the identity in the given form over all oriented curves with `|p| + q ≤ cutoff`.
pub fn mcshane_sum(st: &TwistState<Rational>, cutoff: i64, mode: SumMode, opts: &VerifyOptions) -> Result<GapReport> {
    if cutoff < 1 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 1, got {cutoff}")));
    }
    let engine = CurveEngine::new(st.clone(), opts.precision)?;
    let rows = curve_rows(&engine, cutoff, mode, opts)?;
    Ok(assemble(st, cutoff, mode, rows))
}

/// Classical summand `2/(1 + e^ℓ)` per unoriented curve, `ℓ = ℓ₁` of the positive orientation.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalComparison {
    pub slopes: Vec<CurveSlope>,
    pub classical_terms: Vec<f64>,
    pub paired_terms: Vec<f64>,
    pub classical_total: f64,
    pub curve_total: f64,
    pub max_term_difference: f64,
}

/// Compares curve-mode terms, paired by orientation, with the classical summands.
pub fn classical_comparison(report: &GapReport) -> Result<ClassicalComparison> {
    if report.mode != SumMode::Curve {
        return Err(Error::InvalidInput("classical comparison needs a curve-mode report".into()));
    }
    let mut out = ClassicalComparison {
        slopes: Vec::new(),
        classical_terms: Vec::new(),
        paired_terms: Vec::new(),
        classical_total: 0.0,
        curve_total: report.total,
        max_term_difference: 0.0,
    };
    let mut acc = CompensatedSum::new();
    for pair in report.rows.chunks(2) {
        let [plus, minus] = pair else {
            return Err(Error::InvalidInput("rows are not orientation pairs".into()));
        };
        if plus.slope.reversed() != minus.slope {
            return Err(Error::InvalidInput("rows are not orientation pairs".into()));
        }
        let classical = 2.0 * crate::torus::logistic_gap(plus.l1);
        let paired = plus.gap + minus.gap;
        acc.add(classical);
        out.max_term_difference = out.max_term_difference.max((classical - paired).abs());
        out.slopes.push(plus.slope);
        out.classical_terms.push(classical);
        out.paired_terms.push(paired);
    }
    out.classical_total = acc.value();
    Ok(out)
}
