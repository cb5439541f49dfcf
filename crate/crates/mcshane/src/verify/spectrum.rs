use serde::Serialize;

use crate::cluster::TwistState;
use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::torus::{enumerate_curves, CurveEngine, Orientation};

use super::VerifyOptions;

/// Values closer than this (relative) count as one spectral value.
pub const DISTINCT_TOL: f64 = 1e-9;

/// `D(N)` at one length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountPoint {
    pub n: f64,
    pub count: usize,
}

/// Length spectra up to a complexity cutoff and the growth of their counting function.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub cutoff: i64,
    /// `ℓ₁` of every oriented curve, ascending.
    pub l1_spectrum: Vec<f64>,
    /// `ℓ₁ + ℓ₂` of every unoriented curve, ascending.
    pub length_spectrum: Vec<f64>,
    /// `D(N)`: unoriented curves with `(ℓ₁ + ℓ₂)/2 ≤ N`, at integer `N`.
    pub counting: Vec<CountPoint>,
    pub fit_range: (f64, f64),
    /// Least-squares slope of `log D` against `log N` over the fit range.
    pub growth_exponent: f64,
    /// Every curve beyond the cutoff is at least this long, so `D(N)` is exact below it.
    pub complete_below: f64,
    /// Smallest gap between distinct values of the `ℓ₁` spectrum.
    pub min_gap: f64,
    /// Smallest gap between distinct values of the `ℓ₁ + ℓ₂` spectrum.
    pub min_gap_length: f64,
}

/// Smallest difference between consecutive distinct values of an ascending list.
pub fn min_distinct_gap(sorted: &[f64]) -> f64 {
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > DISTINCT_TOL * sorted.last().map_or(1.0, |m| m.abs().max(1.0)))
        .fold(f64::INFINITY, f64::min)
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Spectrum statistics over curves with `|p| + q ≤ cutoff`, fitting `D(N)` on `[fit_lo, fit_hi]`.
pub fn spectrum(
    st: &TwistState<Rational>,
    cutoff: i64,
    fit_range: (f64, f64),
    opts: &VerifyOptions,
) -> Result<SpectrumReport> {
    let (lo, hi) = fit_range;
    if cutoff < 2 || !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput("spectrum needs cutoff >= 2 and 0 < fit_lo < fit_hi".into()));
    }
    let engine = CurveEngine::new(st.clone(), opts.precision)?;
    let slopes = enumerate_curves(cutoff);
    let invs: Vec<_> = opts.exec.map(&slopes, |s| engine.invariants(s)).into_iter().collect::<Result<_>>()?;

    let mut l1_spectrum: Vec<f64> = invs.iter().map(|i| i.l1).collect();
    l1_spectrum.sort_by(f64::total_cmp);
    let unoriented: Vec<_> = slopes
        .iter()
        .zip(&invs)
        .filter(|(s, _)| s.orientation() == Orientation::Positive)
        .map(|(s, i)| (s.complexity(), i.l1 + i.l2))
        .collect();
    let mut length_spectrum: Vec<f64> = unoriented.iter().map(|u| u.1).collect();
    length_spectrum.sort_by(f64::total_cmp);
    let complete_below =
        unoriented.iter().filter(|(c, _)| 2 * c > cutoff).map(|(_, l)| l / 2.0).fold(f64::INFINITY, f64::min);

    let counting: Vec<CountPoint> = (1..=hi.ceil() as usize)
        .map(|n| {
            let n = n as f64;
            CountPoint { n, count: length_spectrum.iter().filter(|&&l| l / 2.0 <= n).count() }
        })
        .collect();
    let fit: Vec<_> = counting.iter().filter(|p| p.n >= lo && p.n <= hi && p.count > 0).collect();
    let growth_exponent = if fit.len() >= 2 {
        let x: Vec<f64> = fit.iter().map(|p| p.n.ln()).collect();
        let y: Vec<f64> = fit.iter().map(|p| (p.count as f64).ln()).collect();
        ls_slope(&x, &y)
    } else {
        f64::NAN
    };
    Ok(SpectrumReport {
        cutoff,
        min_gap: min_distinct_gap(&l1_spectrum),
        min_gap_length: min_distinct_gap(&length_spectrum),
        l1_spectrum,
        length_spectrum,
        counting,
        fit_range,
        growth_exponent,
        complete_below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_a_power() {
        let x: Vec<f64> = (1..10).map(|n| (n as f64).ln()).collect();
        let y: Vec<f64> = x.iter().map(|l| 2.0 * l + 0.3).collect();
        assert!((ls_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaps_skip_repeated_values() {
        assert_eq!(min_distinct_gap(&[1.0, 1.0, 1.5, 3.0]), 0.5);
        assert_eq!(min_distinct_gap(&[2.0]), f64::INFINITY);
    }

    #[test]
    fn counting_function_is_monotone() {
        let r = spectrum(&TwistState::ones(), 8, (2.0, 5.0), &VerifyOptions::default()).unwrap();
        assert!(r.counting.windows(2).all(|w| w[0].count <= w[1].count));
        assert!(r.l1_spectrum.windows(2).all(|w| w[0] <= w[1]));
        let sys = 2.0 * 1.5f64.acosh();
        assert!((r.l1_spectrum[0] - sys).abs() < 1e-9);
        assert!(r.complete_below > 2.0);
    }
}
