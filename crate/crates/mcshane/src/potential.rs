//! Lozenge coefficients, characters, transport, potential ratios and the gap function, for flag
//! configurations in any dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flags::{attracting_flag, edge_function, repelling_flag, triple_ratio, FlagBasis, TripleIndex};
use crate::numerics::{eigen_real_sorted, Matrix, Scalar};

/// `α^{F;G,H}_{a,b,c}` together with its index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LozengeCoefficient<S> {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: S,
}

fn wedge<S: Scalar>(blocks: &[(&FlagBasis<S>, usize)]) -> Result<S> {
    crate::flags::wedge_det(blocks)
}

fn nonzero<S: Scalar>(d: S, what: &str) -> Result<S> {
    if d.is_zero() || d.to_f64().is_nan() {
        return Err(Error::Degenerate(format!("vanishing {what}")));
    }
    Ok(d)
}

fn triple(i: usize, j: usize, k: usize, n: usize) -> TripleIndex {
    TripleIndex::new(i, j, k, n).expect("caller passes a positive triple")
}

/// Lozenge coefficient
/// `Δ(f^{a−1}∧h^{c+1}∧g^b)·Δ(f^{a+1}∧h^c∧g^{b−1}) / (Δ(f^a∧h^c∧g^b)·Δ(f^a∧h^{c+1}∧g^{b−1}))`.
pub fn alpha_coeff<S: Scalar>(
    f: &FlagBasis<S>,
    g: &FlagBasis<S>,
    h: &FlagBasis<S>,
    a: usize,
    b: usize,
    c: usize,
) -> Result<LozengeCoefficient<S>> {
    let n = f.dim();
    if g.dim() != n || h.dim() != n {
        return Err(Error::DimensionMismatch("flags of different dimensions".into()));
    }
    if a < 1 || b < 1 || a + b + c != n {
        return Err(Error::InvalidInput(format!("bad lozenge index ({a},{b},{c}) for n = {n}")));
    }
    let num = wedge(&[(f, a - 1), (h, c + 1), (g, b)])? * wedge(&[(f, a + 1), (h, c), (g, b - 1)])?;
    let den = nonzero(wedge(&[(f, a), (h, c), (g, b)])?, "lozenge determinant")?
        * nonzero(wedge(&[(f, a), (h, c + 1), (g, b - 1)])?, "lozenge determinant")?;
    Ok(LozengeCoefficient { a, b, c, value: num / den })
}

/// i-th character `P_i(F;G,H) = Σ_{c=0}^{i−1} α_{n−i,i−c,c}`; zero when `G` and `H` are the same flag.
pub fn ith_character<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>, h: &FlagBasis<S>, i: usize) -> Result<S> {
    let n = f.dim();
    if i == 0 || i >= n {
        return Err(Error::InvalidInput(format!("character index {i} outside 1..{}", n - 1)));
    }
    if g.same_flag(h, 1e-12)? {
        return Ok(S::zero());
    }
    let mut sum = S::zero();
    for c in 0..i {
        sum = sum + alpha_coeff(f, g, h, n - i, i - c, c)?.value;
    }
    Ok(sum)
}

/// `P_i` rewritten through triple ratios:
/// `α_{n−i,i,0}·(1 + Σ_{c=1}^{i−1} ∏_{j=1}^{c} 1/T_{n−i,i−j,j})`.
pub fn character_from_triple_ratios<S: Scalar>(
    f: &FlagBasis<S>,
    g: &FlagBasis<S>,
    h: &FlagBasis<S>,
    i: usize,
) -> Result<S> {
    let n = f.dim();
    let lead = alpha_coeff(f, g, h, n - i, i, 0)?.value;
    Ok(lead * inverse_triple_series(f, g, h, i)?)
}

/// `1 + Σ_{c=1}^{i−1} ∏_{j=1}^{c} 1/T_{n−i,i−j,j}(F,G,H)`; equals 1 for `i = 1`.
fn inverse_triple_series<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>, h: &FlagBasis<S>, i: usize) -> Result<S> {
    let n = f.dim();
    let mut total = S::one();
    let mut prod = S::one();
    for j in 1..i {
        prod = prod / triple_ratio(f, g, h, triple(n - i, i - j, j, n))?;
        total = total + prod.clone();
    }
    Ok(total)
}

/// `1 + Σ_{c=1}^{i−1} ∏_{j=1}^{c} T_{n−i,j,i−j}(F,G,H)`.
fn triple_series<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>, h: &FlagBasis<S>, i: usize) -> Result<S> {
    let n = f.dim();
    let mut total = S::one();
    let mut prod = S::one();
    for j in 1..i {
        prod = prod * triple_ratio(f, g, h, triple(n - i, j, i - j, n))?;
        total = total + prod.clone();
    }
    Ok(total)
}

/// `N_a(x)`: identity plus `x` in entry `(a, a+1)`, 1-based.
pub fn elementary_unipotent<S: Scalar>(n: usize, a: usize, x: S) -> Matrix<S> {
    let mut m = Matrix::identity(n);
    m.set(a - 1, a, x);
    m
}

fn lozenge_product<S: Scalar>(
    f: &FlagBasis<S>,
    g: &FlagBasis<S>,
    h: &FlagBasis<S>,
    factors: impl Iterator<Item = (usize, usize)>,
) -> Result<Matrix<S>> {
    let n = f.dim();
    let mut out = Matrix::identity(n);
    for (a, c) in factors {
        let alpha = alpha_coeff(f, g, h, a, n - a - c, c)?.value;
        out = out.matmul(&elementary_unipotent(n, a, alpha));
    }
    Ok(out)
}

/// Lozenge product `∏_{c=n−2}^{0} ∏_{a=n−c−1}^{1} N_a(α_{a,n−a−c,c})`, an upper unipotent matrix
/// whose entry `(n−i, n−i+1)` is `P_i(F;G,H)`.
pub fn transport_matrix<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>, h: &FlagBasis<S>) -> Result<Matrix<S>> {
    let n = f.dim();
    if g.same_flag(h, 1e-12)? {
        return Ok(Matrix::identity(n));
    }
    let order = (0..=n - 2).rev().flat_map(move |c| (1..=n - c - 1).rev().map(move |a| (a, c)));
    lozenge_product(f, g, h, order)
}

/// Columns `e_a ∈ (f_{a+1} + span(f_1,…,f_a)) ∩ G^{(n−a)}`, `a = 0,…,n−1`.
fn adapted_basis<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>) -> Result<Matrix<S>> {
    let n = f.dim();
    let mut cols = Vec::with_capacity(n);
    for a in 0..n {
        let coords: Vec<Vec<S>> = (0..=a).map(|k| g.coordinates(f.vector(k + 1))).collect::<Result<_>>()?;
        let mut col = f.vector(a + 1).to_vec();
        if a > 0 {
            // rows r = n−a..n−1 of the g-coordinates must vanish
            let rows: Vec<Vec<S>> = (n - a..n).map(|r| (0..a).map(|k| coords[k][r].clone()).collect()).collect();
            let rhs: Vec<S> = (n - a..n).map(|r| -coords[a][r].clone()).collect();
            let x = if a == 1 {
                vec![rhs[0].clone() / nonzero(rows[0][0].clone(), "adapted basis pivot")?]
            } else {
                Matrix::from_rows(rows)?.solve(&rhs)?
            };
            for (k, xk) in x.iter().enumerate() {
                for (c, fk) in col.iter_mut().zip(f.vector(k + 1)) {
                    *c = c.clone() + xk.clone() * fk.clone();
                }
            }
        }
        cols.push(col);
    }
    Matrix::from_cols(&cols)
}

/// The unipotent map in standard coordinates that fixes the decorated flag `F` and sends the flag
/// of `G` to the flag of `H`.
pub fn transport_map<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>, h: &FlagBasis<S>) -> Result<Matrix<S>> {
    let eg = adapted_basis(f, g)?;
    let eh = adapted_basis(f, h)?;
    Ok(eh.matmul(&eg.inverse()?))
}

/// Matrix of [`transport_map`] in the `G`-adapted basis: the lozenge product taken with `c` and
/// `a` both ascending.
pub fn transport_in_adapted_basis<S: Scalar>(
    f: &FlagBasis<S>,
    g: &FlagBasis<S>,
    h: &FlagBasis<S>,
) -> Result<Matrix<S>> {
    let n = f.dim();
    let order = (0..=n - 2).flat_map(move |c| (1..=n - c - 1).map(move |a| (a, c)));
    lozenge_product(f, g, h, order)
}

/// `B_i(x;y,z,t) = P_i(x;y,t)/P_i(x;y,z)`.
pub fn potential_ratio<S: Scalar>(
    x: &FlagBasis<S>,
    y: &FlagBasis<S>,
    z: &FlagBasis<S>,
    t: &FlagBasis<S>,
    i: usize,
) -> Result<S> {
    if y.same_flag(z, 1e-12)? {
        return Err(Error::Degenerate("potential ratio with y = z".into()));
    }
    let den = ith_character(x, y, z, i)?;
    if den.is_zero() {
        return Err(Error::Degenerate("vanishing character".into()));
    }
    Ok(ith_character(x, y, t, i)? / den)
}

/// `B_i` through triple ratios and the edge function:
/// `(1+Σ∏1/T(x,y,t)) / (1+Σ∏1/T(x,y,z)) · (−D_i(x,y,z,t))`.
pub fn potential_ratio_closed_form<S: Scalar>(
    x: &FlagBasis<S>,
    y: &FlagBasis<S>,
    z: &FlagBasis<S>,
    t: &FlagBasis<S>,
    i: usize,
) -> Result<S> {
    let num = inverse_triple_series(x, y, t, i)?;
    let den = inverse_triple_series(x, y, z, i)?;
    Ok(num / den * -edge_function(x, y, z, t, i)?)
}

/// `K_i(δ, δ_x)` from the flags `x`, `δx`, `δ⁺`.
pub fn kappa_factor<S: Scalar>(x: &FlagBasis<S>, dx: &FlagBasis<S>, dplus: &FlagBasis<S>, i: usize) -> Result<S> {
    let n = x.dim();
    if i == 0 || i >= n {
        return Err(Error::InvalidInput(format!("index {i} outside 1..{}", n - 1)));
    }
    let series = triple_series(dx, dplus, x, i)? / triple_series(x, dx, dplus, i)?;
    let mut num = S::one();
    for j in 1..n - i {
        num = num * triple_ratio(x, dx, dplus, triple(n - i - j, j, i, n))?;
    }
    let mut den = S::one();
    for j in 1..i {
        den = den * triple_ratio(x, dx, dplus, triple(j, n - i, i - j, n))?;
    }
    Ok(series * num / den)
}

/// `κ_i = log K_i(δ, δ_x)`.
pub fn kappa<S: Scalar>(x: &FlagBasis<S>, dx: &FlagBasis<S>, dplus: &FlagBasis<S>, i: usize) -> Result<f64> {
    let k = kappa_factor(x, dx, dplus, i)?;
    if !k.is_positive() {
        return Err(Error::NonPositive(format!("K_{i} = {}", k.to_f64())));
    }
    Ok(k.to_f64().ln())
}

/// `P_i(x;y,z)/P_i(x;My,Mz)`; equals `λ_i/λ_{i+1}` when `x` is the repelling flag of `M` with
/// its eigenbasis decoration.
pub fn spectral_ratio_check<S: Scalar>(
    x: &FlagBasis<S>,
    y: &FlagBasis<S>,
    z: &FlagBasis<S>,
    m: &Matrix<S>,
    i: usize,
) -> Result<S> {
    let den = ith_character(x, &y.transform(m)?, &z.transform(m)?, i)?;
    Ok(ith_character(x, y, z, i)? / den)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `log((e^{x/2} + e^{(y+z)/2}) / (e^{−x/2} + e^{(y+z)/2}))`, evaluated in the log domain.
pub fn gap_function(x: f64, y: f64, z: f64) -> f64 {
    let s = 0.5 * (y + z);
    if s == f64::INFINITY {
        return 0.0;
    }
    log_add_exp(0.5 * x, s) - log_add_exp(-0.5 * x, s)
}

/// Both sides, and the ingredients, of the cosh relation for a loxodromic pair `(β, γ)` with
/// `α = γ⁻¹β`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoshRelation {
    /// `φ_i + ½(κ_i(γ) + ℓ_i(γ) + κ_i(β) + ℓ_i(β) + ℓ_i(α))`.
    pub lhs: f64,
    /// `ℓ_i(α) + log(−B_i(α⁻;γ⁺,β⁺,γ⁻¹β⁺))`.
    pub rhs: f64,
    pub d: f64,
    pub e: f64,
    pub kappa_beta: f64,
    pub kappa_gamma: f64,
    pub ell_alpha: f64,
    pub ell_beta: f64,
    pub ell_gamma: f64,
    /// `−B_i(α⁻;γα⁻,β⁺,γ⁺)`, `−B_i(α⁻;γ⁻¹α⁻,γ⁺,γ⁻¹β⁺)`, `K_i(β)`, `K_i(γ)` and `−B_i(α⁻;γ⁺,β⁺,γ⁻¹β⁺)` before logs.
    pub raw: [f64; 5],
}

fn ith_length(m: &Matrix<f64>, i: usize, tol: f64) -> Result<f64> {
    let eig = eigen_real_sorted(m, tol)?;
    let (a, b) = (eig.values[i - 1], eig.values[i]);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::NonPositive("spectrum is not positive".into()));
    }
    Ok((a / b).ln())
}

/// The lift `±m` with positive trace, which has positive spectrum when `m` is loxodromic.
fn positive_lift(m: &Matrix<f64>) -> Matrix<f64> {
    if m.trace() < 0.0 {
        m.scale(&-1.0)
    } else {
        m.clone()
    }
}

/// Evaluates the cosh relation for `β, γ` taken up to sign; fails with `NonPositive` when a
/// logarithm's argument is not positive.
pub fn cosh_relation(beta: &Matrix<f64>, gamma: &Matrix<f64>, i: usize, tol: f64) -> Result<CoshRelation> {
    let (beta, gamma) = (&positive_lift(beta), &positive_lift(gamma));
    let gamma_inv = gamma.inverse()?;
    let alpha = positive_lift(&gamma_inv.matmul(beta));
    let am = repelling_flag(&alpha, tol)?;
    let bp = attracting_flag(beta, tol)?;
    let gp = attracting_flag(gamma, tol)?;
    let g_am = am.transform(gamma)?;
    let ginv_am = am.transform(&gamma_inv)?;
    let b_am = am.transform(beta)?;
    let ginv_bp = bp.transform(&gamma_inv)?;
    let bd = -potential_ratio(&am, &g_am, &bp, &gp, i)?;
    let be = -potential_ratio(&am, &ginv_am, &gp, &ginv_bp, i)?;
    let kb = kappa_factor(&am, &b_am, &bp, i)?;
    let kg = kappa_factor(&am, &g_am, &gp, i)?;
    let bt = -potential_ratio(&am, &gp, &bp, &ginv_bp, i)?;
    let raw = [bd, be, kb, kg, bt];
    if raw.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NonPositive("cosh relation needs a positive configuration".into()));
    }
    let (ell_alpha, ell_beta, ell_gamma) =
        (ith_length(&alpha, i, tol)?, ith_length(beta, i, tol)?, ith_length(gamma, i, tol)?);
    let (d, e) = (bd.ln(), be.ln());
    let phi = (0.5 * e).cosh().ln() - (0.5 * d).cosh().ln();
    let (kappa_beta, kappa_gamma) = (kb.ln(), kg.ln());
    let lhs = phi + 0.5 * (kappa_gamma + ell_gamma + kappa_beta + ell_beta + ell_alpha);
    let rhs = ell_alpha + bt.ln();
    Ok(CoshRelation { lhs, rhs, d, e, kappa_beta, kappa_gamma, ell_alpha, ell_beta, ell_gamma, raw })
}
