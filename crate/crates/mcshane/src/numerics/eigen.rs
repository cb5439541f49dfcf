use nalgebra::{DMatrix, Schur, SVD};
use serde::{Deserialize, Serialize};

use super::ext::{Ext, DEFAULT_BITS};
use super::matrix::{norm2, Matrix};
use super::scalar::{ln_abs_rational, rational_from_f64, Rational, Real, Scalar};
use crate::error::{Error, Result};

/// Default relative tolerance for eigen residuals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Above this estimate of `λ_max/λ_min` the cubic solver switches to the extended tier.
pub const CONDITION_LIMIT: f64 = 1e8;

const MAX_NEWTON_STEPS: usize = 2000;
const MAX_DIM: usize = 8;
const MAX_ITERATIONS: usize = 10_000;

/// Floating tier used for spectra and logarithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Doubles, promoted to the extended tier for ill-conditioned spectra.
    #[default]
    Double,
    /// Extended mantissa everywhere a spectrum is computed.
    Extended,
}

impl Precision {
    pub const ENV_VAR: &'static str = "MCSHANE_PRECISION";

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => {
                Err(Error::InvalidInput(format!("unknown precision tier `{other}` (expected double or extended)")))
            }
        }
    }

    /// Reads `MCSHANE_PRECISION`; unset means `Double`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => Self::parse(&v),
            Err(std::env::VarError::NotPresent) => Ok(Precision::Double),
            Err(e) => Err(Error::InvalidInput(e.to_string())),
        }
    }
}

/// Sorted real spectrum with one unit eigenvector per eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen {
    /// Eigenvalues, largest first.
    pub values: Vec<f64>,
    /// Unit eigenvectors; inside a defective cluster the same vector repeats.
    pub vectors: Vec<Vec<f64>>,
}

/// Largest root of `μ³ − μ² + aμ − b` by Newton from `μ = 1`, which lies above it.
fn newton_top<R: Real>(a: &R, b: &R) -> Result<R> {
    let one = R::one();
    let mut mu = one.clone();
    let eps = mu.unit_roundoff() * 8.0;
    for _ in 0..MAX_NEWTON_STEPS {
        let f = ((mu.clone() - one.clone()) * mu.clone() + a.clone()) * mu.clone() - b.clone();
        let df = R::from_i64(3) * mu.clone() * mu.clone() - R::from_i64(2) * mu.clone() + a.clone();
        if !df.is_positive() {
            return Err(Error::ComplexSpectrum);
        }
        let step = f / df;
        if !step.is_positive() {
            return Ok(mu);
        }
        mu = mu - step.clone();
        if step.to_f64() <= eps * mu.to_f64().abs() {
            return Ok(mu);
        }
    }
    Err(Error::NoConvergence("cubic Newton iteration".into()))
}

/// Logarithms of the eigenvalues (largest first) of a 3x3 matrix with positive real spectrum,
/// given its exact elementary symmetric functions.
///
/// The top root comes from the characteristic polynomial scaled by `e1`, the bottom root from
/// the reversed polynomial scaled by `e2/e3`, and the middle root from the determinant.
fn log_positive_spectrum<R: Real>(
    e: &[Rational],
    conv: impl Fn(&Rational) -> R,
    ln: impl Fn(&Rational) -> R,
) -> Result<[R; 3]> {
    let (e1, e2, e3) = (&e[1], &e[2], &e[3]);
    let zero = Rational::from_i64(0);
    if !(*e1 > zero && *e2 > zero && *e3 > zero) {
        return Err(Error::ComplexSpectrum);
    }
    let a = conv(&(e2 / (e1 * e1)));
    let b = conv(&(e3 / (e1 * e1 * e1)));
    let mu1 = newton_top(&a, &b)?;
    let t = e2 / e3;
    let a_rev = conv(&(e1 / (e3 * &t * &t)));
    let b_rev = conv(&(Rational::from_i64(1) / (e3 * &t * &t * &t)));
    let nu3 = newton_top(&a_rev, &b_rev)?;

    let ln_e1 = ln(e1);
    let l1 = ln_e1.clone() + mu1.ln();
    let l3 = -(ln(&t) + nu3.ln());
    let l2 = ln(e3) - l1.clone() - l3.clone();

    let mu2 = (l2.clone() - ln_e1).exp();
    let f = ((mu2.clone() - R::one()) * mu2.clone() + a.clone()) * mu2.clone() - b.clone();
    let scale = mu2.clone() * mu2.clone() * mu2.clone() + mu2.clone() * mu2.clone() + a * mu2 + b;
    if f.to_f64().abs() > 1e-8 * scale.to_f64() {
        return Err(Error::ComplexSpectrum);
    }
    let slack = 1e-9 * (1.0 + l1.to_f64().abs());
    if l2.to_f64() > l1.to_f64() + slack || l3.to_f64() > l2.to_f64() + slack {
        return Err(Error::ComplexSpectrum);
    }
    Ok([l1, l2, l3])
}

/// Logarithms of the eigenvalues, largest first, of an exact 3x3 matrix with positive real
/// spectrum. Uses the extended tier when requested or when the spectrum is ill-conditioned.
pub fn log_spectrum_exact3(m: &Matrix<Rational>, precision: Precision) -> Result<[f64; 3]> {
    if m.dim() != 3 {
        return Err(Error::DimensionMismatch(format!("expected 3x3, got {}x{}", m.dim(), m.dim())));
    }
    let e = m.char_poly_elementary();
    let zero = Rational::from_i64(0);
    if !(e[1] > zero && e[2] > zero && e[3] > zero) {
        return Err(Error::ComplexSpectrum);
    }
    let log_cond = ln_abs_rational(&e[1]) + ln_abs_rational(&e[2]) - 2.0 * ln_abs_rational(&e[3]).min(0.0);
    let max_ln = [&e[1], &e[2], &e[3]].iter().map(|x| ln_abs_rational(x).abs()).fold(0.0, f64::max);
    let use_ext = precision == Precision::Extended || log_cond > CONDITION_LIMIT.ln() || max_ln > 600.0;
    if use_ext {
        let r = log_spectrum_ext3(m, DEFAULT_BITS)?;
        Ok([r[0].to_f64(), r[1].to_f64(), r[2].to_f64()])
    } else {
        log_positive_spectrum(&e, |x| x.to_f64(), ln_abs_rational)
    }
}

/// Extended-precision logarithms of the eigenvalues, largest first, of an exact 3x3 matrix with
/// positive real spectrum.
pub fn log_spectrum_ext3(m: &Matrix<Rational>, bits: usize) -> Result<[Ext; 3]> {
    if m.dim() != 3 {
        return Err(Error::DimensionMismatch(format!("expected 3x3, got {}x{}", m.dim(), m.dim())));
    }
    let e = m.char_poly_elementary();
    log_positive_spectrum(&e, |x| Ext::from_rational_bits(x, bits), |x| Ext::from_rational_bits(x, bits).ln())
}

/// Real eigen-decomposition of a real matrix (n ≤ 8) with real spectrum, sorted descending.
///
/// Each returned pair satisfies `‖Mv − λv‖ ≤ tol·‖M‖`.
pub fn eigen_real_sorted(m: &Matrix<f64>, tol: f64) -> Result<Eigen> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::DimensionMismatch(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    let rows = m.rows();
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let values = match eigenvalues_cubic(m) {
        Some(v) => v,
        None => eigenvalues_schur(m, tol)?,
    };
    let vectors = eigenvectors(m, &values, tol)?;
    let norm = m.norm_inf().max(f64::MIN_POSITIVE);
    for (lambda, v) in values.iter().zip(&vectors) {
        let mv = m.mul_vec(v);
        let res: Vec<f64> = mv.iter().zip(v).map(|(a, b)| a - lambda * b).collect();
        if norm2(&res) > tol * norm {
            return Err(Error::NoConvergence(format!("eigen residual {:.3e} for λ = {lambda}", norm2(&res))));
        }
    }
    Ok(Eigen { values, vectors })
}

fn eigenvalues_cubic(m: &Matrix<f64>) -> Option<Vec<f64>> {
    if m.dim() != 3 {
        return None;
    }
    let exact = m.map(|x| rational_from_f64(*x).expect("finite entry"));
    let e = exact.char_poly_elementary();
    let zero = Rational::from_i64(0);
    if !(e[1] > zero && e[2] > zero && e[3] > zero) {
        return None;
    }
    let logs = log_spectrum_exact3(&exact, Precision::Double).ok()?;
    Some(logs.iter().map(|l| l.exp()).collect())
}

fn eigenvalues_schur(m: &Matrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = m.dim();
    let flat: Vec<f64> = m.rows().into_iter().flatten().collect();
    let a = DMatrix::from_row_slice(n, n, &flat);
    let norm = m.norm_inf().max(f64::MIN_POSITIVE);
    let schur = Schur::try_new(a, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::NoConvergence("Schur iteration".into()))?;
    let mut values = Vec::with_capacity(n);
    for z in schur.complex_eigenvalues().iter() {
        if z.im.abs() > tol.sqrt() * norm {
            return Err(Error::ComplexSpectrum);
        }
        values.push(z.re);
    }
    values.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    Ok(values)
}

/// Unit null vectors of `M − λI`, one per eigenvalue, grouped over clusters of equal eigenvalues.
fn eigenvectors(m: &Matrix<f64>, values: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    let n = m.dim();
    let norm = m.norm_inf().max(f64::MIN_POSITIVE);
    let mut vectors = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (values[i] - values[j]).abs() <= 1e-7 * values[i].abs().max(1.0) {
            j += 1;
        }
        let k = j - i;
        let mean = values[i..j].iter().sum::<f64>() / k as f64;
        let flat: Vec<f64> = m.rows().into_iter().flatten().collect();
        let mut shifted = DMatrix::from_row_slice(n, n, &flat);
        for d in 0..n {
            shifted[(d, d)] -= mean;
        }
        let svd = SVD::try_new(shifted, false, true, f64::EPSILON, MAX_ITERATIONS)
            .ok_or_else(|| Error::NoConvergence("singular value iteration".into()))?;
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| svd.singular_values[x].partial_cmp(&svd.singular_values[y]).expect("finite"));
        let exact_null = order.iter().filter(|&&r| svd.singular_values[r] <= tol * norm).count().max(1);
        for c in 0..k {
            let r = order[c.min(exact_null - 1)];
            let mut v: Vec<f64> = (0..n).map(|col| v_t[(r, col)]).collect();
            normalize_sign(&mut v);
            vectors.push(v);
        }
        i = j;
    }
    Ok(vectors)
}

fn normalize_sign(v: &mut [f64]) {
    let (idx, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, x)| if x.abs() > bv + 1e-12 { (i, x.abs()) } else { (bi, bv) });
    let s = if v[idx] < 0.0 { -1.0 } else { 1.0 };
    let len = norm2(v);
    for x in v.iter_mut() {
        *x *= s / len;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::rational;

    #[test]
    fn diagonal_spectrum_and_standard_vectors() {
        let eig = eigen_real_sorted(&Matrix::diagonal(&[4.0, 2.0, 1.0]), DEFAULT_TOL).unwrap();
        for (got, want) in eig.values.iter().zip([4.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        for (k, v) in eig.vectors.iter().enumerate() {
            assert!((v[k] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unipotent_spectrum_is_all_ones() {
        let u = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 4.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let eig = eigen_real_sorted(&u, 1e-6).unwrap();
        for v in eig.values {
            assert!((v - 1.0).abs() < 1e-4, "{v}");
        }
    }

    #[test]
    fn complex_spectrum_is_rejected() {
        let rot = Matrix::from_rows(vec![vec![0.0, -1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(eigen_real_sorted(&rot, DEFAULT_TOL), Err(Error::ComplexSpectrum));
    }

    #[test]
    fn larger_dimensions_use_schur() {
        let m = Matrix::from_rows(vec![
            vec![5.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 4.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 2.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let eig = eigen_real_sorted(&m, DEFAULT_TOL).unwrap();
        for (got, want) in eig.values.iter().zip([5.0, 4.0, 3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_log_spectrum_of_diagonal() {
        let m = Matrix::diagonal(&[rational(4, 1), rational(2, 1), rational(1, 8)]);
        for precision in [Precision::Double, Precision::Extended] {
            let l = log_spectrum_exact3(&m, precision).unwrap();
            assert!((l[0] - 4f64.ln()).abs() < 1e-14);
            assert!((l[1] - 2f64.ln()).abs() < 1e-14);
            assert!((l[2] + 8f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn ill_conditioned_spectrum_keeps_small_eigenvalue() {
        let big = num::pow(num::BigInt::from(10), 60);
        let m = Matrix::diagonal(&[
            Rational::from_integer(big.clone()),
            rational(3, 1),
            Rational::new(num::BigInt::from(1), big * num::BigInt::from(3)),
        ]);
        let l = log_spectrum_exact3(&m, Precision::Double).unwrap();
        assert!((l[0] - 60.0 * std::f64::consts::LN_10).abs() < 1e-12);
        assert!((l[1] - 3f64.ln()).abs() < 1e-12);
        assert!((l[2] + 60.0 * std::f64::consts::LN_10 + 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn precision_parsing() {
        assert_eq!(Precision::parse("Extended").unwrap(), Precision::Extended);
        assert!(Precision::parse("quad").is_err());
    }
}
