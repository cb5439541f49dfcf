use serde::Serialize;

use crate::cluster::{twist_limits_until, TwistLimits, TwistState};
use crate::error::{Error, Result};
use crate::flags::{attracting_flag_ext3, edge_function, triple_ratio, TripleIndex};
use crate::numerics::{
    ln_abs_rational, log_spectrum_exact3, rational_to_f64, Ext, Matrix, Precision, Rational, Real, Scalar,
};

use super::chart::adapted_chart;
use super::curves::{slope_to_word, CurveSlope};
use super::holonomy::{reconstruct_holonomy, HolonomyRep};

/// Length and triangle invariants of one oriented curve, with its half-pants ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveInvariants {
    pub l1: f64,
    pub l2: f64,
    pub tau: f64,
    pub b1_mu: f64,
    pub b1_mu_prime: f64,
}

/// Log edge functions `d₁ = log D₁`, `e₁ = log D₂` of the pants quadruple of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PantsCoordinates {
    pub d1: f64,
    pub e1: f64,
}

/// `1/(1 + eˣ)` without overflow.
pub fn logistic_gap(x: f64) -> f64 {
    if x > 0.0 {
        let t = (-x).exp();
        t / (1.0 + t)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `1/(1 + e^{ℓ₁+τ})`.
pub fn gap_term(inv: &CurveInvariants) -> f64 {
    logistic_gap(inv.l1 + inv.tau)
}

/// `1/(1 + e^{ℓ₂−τ})`.
pub fn dual_gap_term(inv: &CurveInvariants) -> f64 {
    logistic_gap(inv.l2 - inv.tau)
}

/// `B₁μ/(1 + e^{ℓ₁+τ})`.
pub fn halfpants_gap_term(inv: &CurveInvariants) -> f64 {
    inv.b1_mu * gap_term(inv)
}

/// `B₁μ′/(1 + e^{ℓ₁+τ})`, the term of the other half-pants.
pub fn halfpants_gap_term_prime(inv: &CurveInvariants) -> f64 {
    inv.b1_mu_prime * gap_term(inv)
}

/// `(1 + cosh(e₁/2)/cosh(d₁/2) · e^{(ℓ₁β + τβ + ℓ₁γ + τγ)/2})⁻¹`.
pub fn pants_gap_term(l1_beta: f64, tau_beta: f64, l1_gamma: f64, tau_gamma: f64, d1: f64, e1: f64) -> f64 {
    let x = ln_cosh(e1 / 2.0) - ln_cosh(d1 / 2.0) + (l1_beta + tau_beta + l1_gamma + tau_gamma) / 2.0;
    logistic_gap(x)
}

/// Per-curve computations against a fixed base chart.
#[derive(Clone, Debug)]
pub struct CurveEngine {
    state: TwistState<Rational>,
    rep: HolonomyRep<Rational>,
    precision: Precision,
}

impl CurveEngine {
    pub fn new(state: TwistState<Rational>, precision: Precision) -> Result<Self> {
        let rep = reconstruct_holonomy(&state)?;
        Ok(CurveEngine { state, rep, precision })
    }

    pub fn state(&self) -> &TwistState<Rational> {
        &self.state
    }

    pub fn rep(&self) -> &HolonomyRep<Rational> {
        &self.rep
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// `ρ(word(s))`.
    pub fn word_matrix(&self, s: &CurveSlope) -> Matrix<Rational> {
        self.rep.eval(&slope_to_word(s))
    }

    pub fn adapted(&self, s: &CurveSlope) -> TwistState<Rational> {
        adapted_chart(&self.state, s)
    }

    /// Log eigenvalues of `ρ(word(s))`, largest first.
    pub fn log_spectrum(&self, s: &CurveSlope) -> Result<[f64; 3]> {
        log_spectrum_exact3(&self.word_matrix(s), self.precision)
    }

    pub fn invariants(&self, s: &CurveSlope) -> Result<CurveInvariants> {
        curve_invariants(&self.rep, &self.state, s, self.precision)
    }

    /// `log T(X', γX', γ⁺)` from the flags of the adapted chart.
    pub fn direct_tau(&self, s: &CurveSlope, bits: usize) -> Result<f64> {
        let rep = reconstruct_holonomy(&self.adapted(s))?;
        let a = rep.a().map(|x| Ext::from_rational_bits(x, bits));
        let x = rep.cusp_flag()?.to_ext(bits);
        let gx = x.transform(&a)?;
        let plus = attracting_flag_ext3(rep.a(), bits)?;
        let t = triple_ratio(&x, &gx, &plus, TripleIndex::new(1, 1, 1, 3)?)?;
        ln_positive(&t)
    }

    /// Edge functions of `(X', γX', β⁺, γ⁺)` with `β = δ⁻¹γδ` in the adapted chart.
    pub fn pants_coordinates(&self, s: &CurveSlope, bits: usize) -> Result<PantsCoordinates> {
        let rep = reconstruct_holonomy(&self.adapted(s))?;
        let a = rep.a().map(|x| Ext::from_rational_bits(x, bits));
        let b_inv = rep.b().inverse()?.map(|x| Ext::from_rational_bits(x, bits));
        let x = rep.cusp_flag()?.to_ext(bits);
        let gx = x.transform(&a)?;
        let gamma_plus = attracting_flag_ext3(rep.a(), bits)?;
        let beta_plus = gamma_plus.transform(&b_inv)?;
        let d1 = ln_positive(&edge_function(&x, &gx, &beta_plus, &gamma_plus, 1)?)?;
        let e1 = ln_positive(&edge_function(&x, &gx, &beta_plus, &gamma_plus, 2)?)?;
        Ok(PantsCoordinates { d1, e1 })
    }

    /// Ratio sequences of repeated twists along `s`.
    pub fn twist_limits(&self, s: &CurveSlope, cap: usize, tol: f64) -> Result<TwistLimits> {
        twist_limits_until(&self.adapted(s), cap, tol)
    }
}

fn ln_positive(x: &Ext) -> Result<f64> {
    if !x.is_positive() {
        return Err(Error::NonPositive(format!("expected a positive invariant, got {}", x.to_f64())));
    }
    Ok(x.ln().to_f64())
}

/// `ℓ₁`, `ℓ₂` from the spectrum of `ρ(word(s))`; `τ = log(a₁λ₂/a₂)` and the half-pants ratios in
/// the chart adapted to `s`.
pub fn curve_invariants(
    rep: &HolonomyRep<Rational>,
    base_state: &TwistState<Rational>,
    s: &CurveSlope,
    precision: Precision,
) -> Result<CurveInvariants> {
    let logs = log_spectrum_exact3(&rep.eval(&slope_to_word(s)), precision)?;
    if !(logs[0] > logs[1] && logs[1] > logs[2]) {
        return Err(Error::RepeatedEigenvalues);
    }
    let adapted = adapted_chart(base_state, s);
    let tau = ln_abs_rational(adapted.a1()) - ln_abs_rational(adapted.a2()) + logs[1];
    let hp = adapted.halfpants_potentials();
    Ok(CurveInvariants {
        l1: logs[0] - logs[1],
        l2: logs[1] - logs[2],
        tau,
        b1_mu: rational_to_f64(&hp.b1_mu),
        b1_mu_prime: rational_to_f64(&hp.b1_mu_prime),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rational, DEFAULT_BITS};
    use crate::torus::curves::{enumerate_curves, Orientation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine(seed: u64) -> CurveEngine {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = TwistState::random(&mut rng, &rational(1, 3), &rational(3, 1), 6).unwrap();
        CurveEngine::new(st, Precision::Double).unwrap()
    }

    fn slope(p: i64, q: i64) -> CurveSlope {
        CurveSlope::new(p, q, Orientation::Positive).unwrap()
    }

    #[test]
    fn gap_term_examples() {
        // golden-ratio oracle: systole eigenvalue ratio is φ⁴
        let phi4 = ((1.0 + 5f64.sqrt()) / 2.0).powi(4);
        let l = 2.0 * 1.5f64.acosh();
        let inv = CurveInvariants { l1: l, l2: l, tau: 0.0, b1_mu: 0.5, b1_mu_prime: 0.5 };
        assert!((gap_term(&inv) - 1.0 / (1.0 + phi4)).abs() < 1e-15);
        assert!((gap_term(&inv) - 0.127322).abs() < 1e-6);
        assert!((halfpants_gap_term(&inv) - 0.063661).abs() < 1e-6);
        assert_eq!(logistic_gap(1e4), 0.0);
        assert_eq!(logistic_gap(-1e4), 1.0);
    }

    #[test]
    fn pants_term_examples() {
        let l: f64 = 1.3;
        assert!((pants_gap_term(l, 0.0, l, 0.0, 0.0, 0.0) - 1.0 / (1.0 + l.exp())).abs() < 1e-15);
        let base = pants_gap_term(0.7, 0.1, 0.7, 0.1, 0.0, 0.0);
        assert!((pants_gap_term(0.7, 0.1, 0.7, 0.1, 1.0, -1.0) - base).abs() < 1e-15);
        assert!(pants_gap_term(0.8, 0.1, 0.7, 0.1, 0.3, 0.2) < pants_gap_term(0.7, 0.1, 0.7, 0.1, 0.3, 0.2));
    }

    #[test]
    fn fuchsian_invariants() {
        let e = CurveEngine::new(TwistState::ones(), Precision::Double).unwrap();
        let sys = 2.0 * 1.5f64.acosh();
        for s in enumerate_curves(6) {
            let inv = e.invariants(&s).unwrap();
            assert!(inv.tau.abs() < 1e-9 && (inv.l1 - inv.l2).abs() < 1e-9, "{s}");
            assert!(inv.l1 >= sys - 1e-9);
        }
        let inv = e.invariants(&slope(0, 1)).unwrap();
        assert!((inv.l1 - sys).abs() < 1e-12);
        assert!((inv.b1_mu - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reversal_swaps_lengths_and_negates_tau() {
        let e = engine(11);
        for s in enumerate_curves(7) {
            let a = e.invariants(&s).unwrap();
            let b = e.invariants(&s.reversed()).unwrap();
            assert!((a.l1 - b.l2).abs() < 1e-9 && (a.l2 - b.l1).abs() < 1e-9, "{s}");
            assert!((a.tau + b.tau).abs() < 1e-9, "{s}");
            assert!((gap_term(&a) - dual_gap_term(&b)).abs() < 1e-12);
            assert!((a.b1_mu + a.b1_mu_prime - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_matches_the_flag_triple_ratio() {
        for seed in 0..4 {
            let e = engine(seed);
            for s in enumerate_curves(3) {
                let tau = e.invariants(&s).unwrap().tau;
                let direct = e.direct_tau(&s, DEFAULT_BITS).unwrap();
                assert!((tau - direct).abs() < 1e-8, "{s}: {tau} vs {direct}");
            }
        }
    }

    #[test]
    fn pants_coordinates_are_reciprocal() {
        let e = engine(2);
        for s in enumerate_curves(4) {
            let pc = e.pants_coordinates(&s, DEFAULT_BITS).unwrap();
            assert!((pc.d1 + pc.e1).abs() < 1e-10, "{s}");
            let inv = e.invariants(&s).unwrap();
            let t = pants_gap_term(inv.l1, inv.tau, inv.l1, inv.tau, pc.d1, pc.e1);
            assert!((t - gap_term(&inv)).abs() < 1e-10);
        }
    }

    #[test]
    fn twist_limits_match_the_spectrum() {
        let e = engine(4);
        for s in enumerate_curves(5) {
            let logs = e.log_spectrum(&s).unwrap();
            let lim = e.twist_limits(&s, 60, 1e-13).unwrap();
            assert!((lim.lambda1 / logs[0].exp() - 1.0).abs() < 1e-6, "{s}");
            assert!((lim.lambda1_lambda2 / (logs[0] + logs[1]).exp() - 1.0).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn rotated_words_give_the_same_lengths() {
        let e = engine(8);
        for s in enumerate_curves(6) {
            let w = slope_to_word(&s);
            let l = log_spectrum_exact3(&e.rep().eval(&w), Precision::Double).unwrap();
            for k in 1..w.len() {
                let r = log_spectrum_exact3(&e.rep().eval(&w.rotated(k)), Precision::Double).unwrap();
                assert!((r[0] - r[1] - (l[0] - l[1])).abs() < 1e-10);
                assert!((r[1] - r[2] - (l[1] - l[2])).abs() < 1e-10);
            }
        }
    }
}
