use serde::Serialize;

use crate::cluster::TwistState;
use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::torus::{enumerate_curves, CurveEngine, CurveSlope, Orientation};

use super::VerifyOptions;

/// Collar quantity of one pair of distinct unoriented curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollarPair {
    pub beta: CurveSlope,
    pub gamma: CurveSlope,
    /// `(e^{ℓ(β)/2} − 1)(e^{ℓ(γ)/2} − 1)` with `ℓ = ℓ₁ + ℓ₂`.
    pub lhs: f64,
}

/// All pairs, ascending by `lhs`.
#[derive(Clone, Debug, Serialize)]
pub struct CollarReport {
    pub cutoff: i64,
    pub pairs: Vec<CollarPair>,
    pub min: f64,
    pub all_above_four: bool,
}

/// `(e^{ℓβ/2} − 1)(e^{ℓγ/2} − 1)`.
pub fn collar_lhs(l_beta: f64, l_gamma: f64) -> f64 {
    (l_beta / 2.0).exp_m1() * (l_gamma / 2.0).exp_m1()
}

/// Collar quantities for every pair of distinct unoriented curves with `|p| + q ≤ cutoff`.
pub fn collar_sweep(st: &TwistState<Rational>, cutoff: i64, opts: &VerifyOptions) -> Result<CollarReport> {
    if cutoff < 1 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 1, got {cutoff}")));
    }
    let engine = CurveEngine::new(st.clone(), opts.precision)?;
    let slopes: Vec<CurveSlope> =
        enumerate_curves(cutoff).into_iter().filter(|s| s.orientation() == Orientation::Positive).collect();
    let lengths: Vec<f64> =
        opts.exec.map(&slopes, |s| engine.invariants(s).map(|i| i.l1 + i.l2)).into_iter().collect::<Result<_>>()?;
    let mut pairs = Vec::with_capacity(slopes.len() * slopes.len().saturating_sub(1) / 2);
    for i in 0..slopes.len() {
        for j in i + 1..slopes.len() {
            pairs.push(CollarPair { beta: slopes[i], gamma: slopes[j], lhs: collar_lhs(lengths[i], lengths[j]) });
        }
    }
    pairs.sort_by(|a, b| a.lhs.total_cmp(&b.lhs));
    let min = pairs.first().map_or(f64::INFINITY, |p| p.lhs);
    Ok(CollarReport { cutoff, min, all_above_four: min > 4.0, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuchsian_systole_pair() {
        let r = collar_sweep(&TwistState::ones(), 1, &VerifyOptions::default()).unwrap();
        assert_eq!(r.pairs.len(), 1);
        let phi4 = ((1.0 + 5f64.sqrt()) / 2.0).powi(4);
        assert!((r.min - (phi4 - 1.0).powi(2)).abs() < 1e-9);
        assert!((r.min - 34.2705).abs() < 1e-4);
    }

    #[test]
    fn sweep_is_sorted_and_bounded() {
        let r = collar_sweep(&TwistState::ones(), 6, &VerifyOptions::default()).unwrap();
        assert!(r.pairs.windows(2).all(|w| w[0].lhs <= w[1].lhs));
        assert!(r.all_above_four);
    }
}
