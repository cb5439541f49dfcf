use serde::Serialize;

use crate::cluster::TwistState;
use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::torus::{enumerate_curves, CurveEngine, CurveInvariants, CurveSlope};

use super::VerifyOptions;

/// Finite-cutoff gap metric between two structures, with the length-ratio analogue.
#[derive(Clone, Debug, Serialize)]
pub struct GapMetricReport {
    pub cutoff: i64,
    /// `log sup_γ log(1 + e^{ℓ₁ᴮ+τᴮ}) / log(1 + e^{ℓ₁ᴬ+τᴬ})`.
    pub d_gap: f64,
    pub d_gap_argmax: CurveSlope,
    /// `log sup_γ ℓᴮ(γ)/ℓᴬ(γ)` with `ℓ = ℓ₁ + ℓ₂`.
    pub thurston: f64,
    pub thurston_argmax: CurveSlope,
    /// The gap ratio at the shortest curve of the first structure.
    pub systole_ratio: f64,
    pub systole: CurveSlope,
}

/// `log(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn all_invariants(
    st: &TwistState<Rational>,
    slopes: &[CurveSlope],
    opts: &VerifyOptions,
) -> Result<Vec<CurveInvariants>> {
    let engine = CurveEngine::new(st.clone(), opts.precision)?;
    opts.exec.map(slopes, |s| engine.invariants(s)).into_iter().collect()
}

/// Gap metric `d(A, B)` over oriented curves with `|p| + q ≤ cutoff`.
pub fn gap_metric(
    a: &TwistState<Rational>,
    b: &TwistState<Rational>,
    cutoff: i64,
    opts: &VerifyOptions,
) -> Result<GapMetricReport> {
    if cutoff < 1 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 1, got {cutoff}")));
    }
    let slopes = enumerate_curves(cutoff);
    let ia = all_invariants(a, &slopes, opts)?;
    let ib = all_invariants(b, &slopes, opts)?;
    let mut gap = (f64::NEG_INFINITY, slopes[0]);
    let mut length = (f64::NEG_INFINITY, slopes[0]);
    let mut systole = (f64::INFINITY, slopes[0], 0.0);
    for ((s, x), y) in slopes.iter().zip(&ia).zip(&ib) {
        let ratio = softplus(y.l1 + y.tau) / softplus(x.l1 + x.tau);
        if ratio > gap.0 {
            gap = (ratio, *s);
        }
        let lr = (y.l1 + y.l2) / (x.l1 + x.l2);
        if lr > length.0 {
            length = (lr, *s);
        }
        if x.l1 < systole.0 {
            systole = (x.l1, *s, ratio);
        }
    }
    Ok(GapMetricReport {
        cutoff,
        d_gap: gap.0.ln(),
        d_gap_argmax: gap.1,
        thurston: length.0.ln(),
        thurston_argmax: length.1,
        systole_ratio: systole.2,
        systole: systole.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    #[test]
    fn distance_to_itself_is_zero() {
        let st = TwistState::fuchsian(&rational(1, 1), &rational(2, 1), &rational(3, 2)).unwrap();
        let r = gap_metric(&st, &st, 6, &VerifyOptions::default()).unwrap();
        assert_eq!(r.d_gap, 0.0);
        assert_eq!(r.thurston, 0.0);
    }

    #[test]
    fn sup_dominates_the_systole_term() {
        let a = TwistState::ones();
        let b = TwistState::fuchsian(&rational(1, 1), &rational(3, 2), &rational(2, 1)).unwrap();
        let r = gap_metric(&a, &b, 6, &VerifyOptions::default()).unwrap();
        assert!(r.d_gap >= r.systole_ratio.ln());
        assert!(r.d_gap > 0.0);
    }

    #[test]
    fn fuchsian_pair_matches_the_length_ratio_metric() {
        let a = TwistState::ones();
        let b = TwistState::fuchsian(&rational(1, 1), &rational(2, 1), &rational(3, 1)).unwrap();
        let r = gap_metric(&a, &b, 20, &VerifyOptions::default()).unwrap();
        assert!((r.d_gap - r.thurston).abs() <= 0.05 * r.thurston, "{} vs {}", r.d_gap, r.thurston);
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-16);
        assert!(softplus(-800.0) >= 0.0);
    }
}
