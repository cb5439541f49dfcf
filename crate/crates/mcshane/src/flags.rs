//! Flags in ℝⁿ stored as volume-normalized bases, and their projective invariants.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{
    cross3, det, eigen_real_sorted, log_spectrum_ext3, norm2, parse_rational, rational_to_string, Ext, Matrix,
    Rational, Real, Scalar,
};

/// Basis `(f₁,…,fₙ)` of a flag with `Δ(f¹∧…∧fⁿ) = 1`; `fᵢ` spans the i-th step modulo the previous ones.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagBasis<S> {
    vectors: Vec<Vec<S>>,
}

/// A flag together with the decoration given by its first `n − 1` basis vectors.
pub type DecoratedFlag<S> = FlagBasis<S>;

impl<S: Scalar> FlagBasis<S> {
    /// Validates and rescales the last vector so the basis has volume 1.
    pub fn new(vectors: Vec<Vec<S>>) -> Result<Self> {
        let n = vectors.len();
        if n < 2 {
            return Err(Error::DimensionMismatch(format!("flag needs n >= 2 vectors, got {n}")));
        }
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("flag vectors must have length {n}")));
        }
        let d = det(&vectors)?;
        if d.is_negligible(column_scale(&vectors.iter().collect::<Vec<_>>())) {
            return Err(Error::Degenerate("flag basis is linearly dependent".into()));
        }
        let mut vectors = vectors;
        let last = vectors.last_mut().expect("n >= 2");
        for x in last.iter_mut() {
            *x = x.clone() / d.clone();
        }
        Ok(FlagBasis { vectors })
    }

    /// Flag of `ℝ³` through the point `u` inside the line `ker φ`.
    pub fn from_point_line(u: &[S], phi: &[S]) -> Result<Self> {
        if u.len() != 3 || phi.len() != 3 {
            return Err(Error::DimensionMismatch("point-line flags live in dimension 3".into()));
        }
        let incidence = crate::numerics::dot(u, phi);
        let scale = norm2(&u.iter().map(|x| x.to_f64()).collect::<Vec<_>>())
            * norm2(&phi.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
        if !incidence.is_negligible(scale) {
            return Err(Error::InvalidInput("point does not lie on the line".into()));
        }
        let f2 = cross3(phi, u);
        FlagBasis::new(vec![u.to_vec(), f2, phi.to_vec()])
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<S>] {
        &self.vectors
    }

    /// The k-th basis vector, 1-based as `f_k`.
    pub fn vector(&self, k: usize) -> &[S] {
        &self.vectors[k - 1]
    }

    /// Image under `g`, renormalized to volume 1.
    pub fn transform(&self, g: &Matrix<S>) -> Result<Self> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("matrix {} vs flag {}", g.dim(), self.dim())));
        }
        let n = self.dim();
        let d = g.det();
        if d.is_zero() || !d.to_f64().is_finite() {
            return Err(Error::Degenerate("singular transformation".into()));
        }
        let mut vectors: Vec<Vec<S>> = self.vectors.iter().map(|v| g.mul_vec(v)).collect();
        for x in vectors[n - 1].iter_mut() {
            *x = x.clone() / d.clone();
        }
        Ok(FlagBasis { vectors })
    }

    /// Rescales `f̌ᵢ` by `scales[i]` for `i < n − 1`; same flag, different decoration.
    pub fn rescale_decoration(&self, scales: &[S]) -> Result<Self> {
        if scales.len() != self.dim() - 1 {
            return Err(Error::DimensionMismatch(format!("expected {} scales", self.dim() - 1)));
        }
        let mut vectors = self.vectors.clone();
        for (v, s) in vectors.iter_mut().zip(scales) {
            for x in v.iter_mut() {
                *x = x.clone() * s.clone();
            }
        }
        FlagBasis::new(vectors)
    }

    /// Coordinates of `v` in this basis.
    pub fn coordinates(&self, v: &[S]) -> Result<Vec<S>> {
        Matrix::from_cols(&self.vectors)?.solve(v)
    }

    /// Whether `other` spans the same flag: each `g_j` lies in `span(f₁,…,f_j)`.
    pub fn same_flag(&self, other: &Self, tol: f64) -> Result<bool> {
        let n = self.dim();
        for j in 1..=n {
            let c = self.coordinates(other.vector(j))?;
            let size = c.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
            for x in &c[j..] {
                let vanishes = if S::EXACT { x.is_zero() } else { x.to_f64().abs() <= tol * size };
                if !vanishes {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Each step of the flag is preserved by `m`.
    pub fn is_fixed_by(&self, m: &Matrix<S>, tol: f64) -> Result<bool> {
        self.transform(m)?.same_flag(self, tol)
    }

    pub fn to_f64(&self) -> FlagBasis<f64> {
        FlagBasis { vectors: self.vectors.iter().map(|v| v.iter().map(|x| x.to_f64()).collect()).collect() }
    }
}

impl FlagBasis<Rational> {
    pub fn to_ext(&self, bits: usize) -> FlagBasis<Ext> {
        FlagBasis {
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|x| Ext::from_rational_bits(x, bits)).collect())
                .collect(),
        }
    }
}

fn column_scale<S: Scalar>(cols: &[&Vec<S>]) -> f64 {
    cols.iter().map(|c| norm2(&c.iter().map(|x| x.to_f64()).collect::<Vec<_>>())).product()
}

/// Multi-index `(i, j, k)` of positive integers with `i + j + k = n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleIndex {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl TripleIndex {
    pub fn new(i: usize, j: usize, k: usize, n: usize) -> Result<Self> {
        if i == 0 || j == 0 || k == 0 || i + j + k != n {
            return Err(Error::InvalidInput(format!("({i},{j},{k}) is not a positive triple summing to {n}")));
        }
        Ok(TripleIndex { i, j, k })
    }

    /// All positive triples summing to `n`, lexicographic.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 1..n {
            for j in 1..n - i {
                out.push(TripleIndex { i, j, k: n - i - j });
            }
        }
        out
    }

    /// `(j, k, i)`.
    pub fn cycled(&self) -> Self {
        TripleIndex { i: self.j, j: self.k, k: self.i }
    }
}

/// `Δ` of the concatenated leading blocks `f^{a} ∧ g^{b} ∧ …`; the counts must sum to `n`.
pub fn wedge_det<S: Scalar>(blocks: &[(&FlagBasis<S>, usize)]) -> Result<S> {
    let n = blocks.first().map(|(f, _)| f.dim()).ok_or_else(|| Error::InvalidInput("empty wedge".into()))?;
    if blocks.iter().any(|(f, _)| f.dim() != n) {
        return Err(Error::DimensionMismatch("flags of different dimensions".into()));
    }
    if blocks.iter().map(|(_, k)| k).sum::<usize>() != n {
        return Err(Error::DimensionMismatch(format!("wedge block sizes must sum to {n}")));
    }
    let cols: Vec<Vec<S>> = blocks.iter().flat_map(|(f, k)| f.vectors[..*k].iter().cloned()).collect();
    det(&cols)
}

/// Wedge determinant that rejects (thresholded) zero values.
fn nonzero_wedge<S: Scalar>(blocks: &[(&FlagBasis<S>, usize)]) -> Result<S> {
    let d = wedge_det(blocks)?;
    let refs: Vec<&Vec<S>> = blocks.iter().flat_map(|(f, k)| f.vectors[..*k].iter()).collect();
    if d.is_negligible(column_scale(&refs)) {
        return Err(Error::Degenerate("flags are not in generic position".into()));
    }
    Ok(d)
}

/// Requires `Δ(f^{n−i} ∧ g^{i}) ≠ 0` for `0 < i < n`.
pub fn check_pair_generic<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>) -> Result<()> {
    let n = f.dim();
    for i in 1..n {
        nonzero_wedge(&[(f, n - i), (g, i)])?;
    }
    Ok(())
}

/// Triple ratio `T_{i,j,k}(F, G, H)`.
pub fn triple_ratio<S: Scalar>(f: &FlagBasis<S>, g: &FlagBasis<S>, h: &FlagBasis<S>, idx: TripleIndex) -> Result<S> {
    let n = f.dim();
    TripleIndex::new(idx.i, idx.j, idx.k, n)?;
    let (i, j, k) = (idx.i, idx.j, idx.k);
    let num = nonzero_wedge(&[(f, i + 1), (g, j), (h, k - 1)])?
        * nonzero_wedge(&[(f, i - 1), (g, j + 1), (h, k)])?
        * nonzero_wedge(&[(f, i), (g, j - 1), (h, k + 1)])?;
    let den = nonzero_wedge(&[(f, i + 1), (g, j - 1), (h, k)])?
        * nonzero_wedge(&[(f, i), (g, j + 1), (h, k - 1)])?
        * nonzero_wedge(&[(f, i - 1), (g, j), (h, k + 1)])?;
    Ok(num / den)
}

/// Edge function `D_i(X, Y, Z, W)`, `1 ≤ i ≤ n − 1`. All six pairs must be generic.
pub fn edge_function<S: Scalar>(
    x: &FlagBasis<S>,
    y: &FlagBasis<S>,
    z: &FlagBasis<S>,
    w: &FlagBasis<S>,
    i: usize,
) -> Result<S> {
    let n = x.dim();
    if i == 0 || i >= n {
        return Err(Error::InvalidInput(format!("edge index {i} outside 1..{}", n - 1)));
    }
    let quad = [x, y, z, w];
    for a in 0..4 {
        for b in a + 1..4 {
            check_pair_generic(quad[a], quad[b])?;
        }
    }
    let num = nonzero_wedge(&[(x, n - i), (y, i - 1), (z, 1)])? * nonzero_wedge(&[(x, n - i - 1), (y, i), (w, 1)])?;
    let den = nonzero_wedge(&[(x, n - i - 1), (y, i), (z, 1)])? * nonzero_wedge(&[(x, n - i), (y, i - 1), (w, 1)])?;
    Ok(-(num / den))
}

/// Positivity of a cyclically ordered tuple of flags with respect to the fan triangulation from
/// vertex `apex`: every triple ratio of every triangle `(apex, k, k+1)` and every edge function of
/// every diagonal `(apex, k)` is strictly positive.
pub fn is_positive_polygon<S: Scalar>(cfg: &[FlagBasis<S>], apex: usize) -> Result<bool> {
    let d = cfg.len();
    if d < 3 {
        return Err(Error::InvalidInput(format!("a polygon needs at least 3 flags, got {d}")));
    }
    if apex >= d {
        return Err(Error::InvalidInput(format!("apex {apex} outside 0..{d}")));
    }
    let n = cfg[0].dim();
    if cfg.iter().any(|f| f.dim() != n) {
        return Err(Error::DimensionMismatch("flags of different dimensions".into()));
    }
    for a in 0..d {
        for b in a + 1..d {
            check_pair_generic(&cfg[a], &cfg[b])?;
        }
    }
    let at = |k: usize| &cfg[(apex + k) % d];
    let x = at(0);
    let mut positive = true;
    for k in 1..d - 1 {
        for idx in TripleIndex::all(n) {
            positive &= triple_ratio(x, at(k), at(k + 1), idx)?.is_positive();
        }
    }
    for k in 2..d - 1 {
        for i in 1..n {
            positive &= edge_function(x, at(k), at(k + 1), at(k - 1), i)?.is_positive();
        }
    }
    Ok(positive)
}

fn eigenflag(m: &Matrix<f64>, tol: f64, descending: bool) -> Result<FlagBasis<f64>> {
    let eig = eigen_real_sorted(m, tol)?;
    for w in eig.values.windows(2) {
        if (w[0] - w[1]).abs() <= tol.sqrt() * w[0].abs().max(1.0) {
            return Err(Error::RepeatedEigenvalues);
        }
    }
    let mut vectors = eig.vectors;
    if !descending {
        vectors.reverse();
    }
    FlagBasis::new(vectors)
}

/// Eigenbasis of a loxodromic matrix, largest eigenvalue first.
pub fn attracting_flag(m: &Matrix<f64>, tol: f64) -> Result<FlagBasis<f64>> {
    eigenflag(m, tol, true)
}

/// Eigenbasis of a loxodromic matrix, smallest eigenvalue first.
pub fn repelling_flag(m: &Matrix<f64>, tol: f64) -> Result<FlagBasis<f64>> {
    eigenflag(m, tol, false)
}

/// Attracting flag of an exact 3x3 loxodromic matrix, computed in extended precision.
pub fn attracting_flag_ext3(m: &Matrix<Rational>, bits: usize) -> Result<FlagBasis<Ext>> {
    let logs = log_spectrum_ext3(m, bits)?;
    let mx = m.map(|x| Ext::from_rational_bits(x, bits));
    let mut vectors = Vec::with_capacity(3);
    for l in logs.iter() {
        let lambda = l.exp();
        let mut shifted = mx.clone();
        for d in 0..3 {
            shifted.set(d, d, shifted.get(d, d).clone() - lambda.clone());
        }
        let rows = shifted.rows();
        let candidates = [cross3(&rows[0], &rows[1]), cross3(&rows[0], &rows[2]), cross3(&rows[1], &rows[2])];
        let best = candidates
            .into_iter()
            .max_by(|a, b| {
                let na = norm2(&a.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
                let nb = norm2(&b.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
                na.total_cmp(&nb)
            })
            .expect("three candidates");
        vectors.push(best);
    }
    FlagBasis::new(vectors)
}

/// Point of `ℝP¹` parametrizing the Veronese curve.
#[derive(Clone, Debug, PartialEq)]
pub enum VeroneseParam<S> {
    Finite(S),
    Infinity,
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, t| acc * (n - t) as i64 / (t + 1) as i64)
}

/// Osculating flag of `[1 : t : … : t^{n−1}]`: `f_k = v^{(k−1)}(t)/(k−1)!`, volume 1.
/// At infinity the flag is the reversed standard flag.
pub fn veronese_flag<S: Scalar>(t: &VeroneseParam<S>, n: usize) -> Result<FlagBasis<S>> {
    if n < 2 {
        return Err(Error::DimensionMismatch(format!("n = {n} < 2")));
    }
    let vectors = match t {
        VeroneseParam::Finite(t) => (1..=n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        if j + 1 < k {
                            S::zero()
                        } else {
                            let mut p = S::from_i64(binomial(j, k - 1));
                            for _ in 0..(j + 1 - k) {
                                p = p * t.clone();
                            }
                            p
                        }
                    })
                    .collect()
            })
            .collect(),
        VeroneseParam::Infinity => {
            (1..=n).map(|k| (0..n).map(|j| if j == n - k { S::one() } else { S::zero() }).collect()).collect()
        }
    };
    FlagBasis::new(vectors)
}

/// Irreducible image of `[[a, b], [c, d]]` in `GL_n`: row `j` holds the coefficients of
/// `(ax + by)^{n−1−j} (cx + dy)^j` in the monomials `x^{n−1−k} y^k`. It maps the Veronese flag at
/// `t` to the Veronese flag at `(c + dt)/(a + bt)`.
pub fn veronese_matrix<S: Scalar>(a: &S, b: &S, c: &S, d: &S, n: usize) -> Matrix<S> {
    let poly_pow = |p: &S, q: &S, e: usize| -> Vec<S> {
        let mut coeffs = vec![S::one()];
        for _ in 0..e {
            let mut next = vec![S::zero(); coeffs.len() + 1];
            for (k, ck) in coeffs.iter().enumerate() {
                next[k] = next[k].clone() + ck.clone() * p.clone();
                next[k + 1] = next[k + 1].clone() + ck.clone() * q.clone();
            }
            coeffs = next;
        }
        coeffs
    };
    let mut m: Matrix<S> = Matrix::zeros(n);
    for j in 0..n {
        let left = poly_pow(a, b, n - 1 - j);
        let right = poly_pow(c, d, j);
        for (p, lp) in left.iter().enumerate() {
            for (q, rq) in right.iter().enumerate() {
                let cur = m.get(j, p + q).clone();
                m.set(j, p + q, cur + lp.clone() * rq.clone());
            }
        }
    }
    m
}

impl Serialize for FlagBasis<Rational> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let rows: Vec<Vec<String>> = self.vectors.iter().map(|v| v.iter().map(rational_to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlagBasis<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let vectors = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| parse_rational(x).ok_or_else(|| D::Error::custom(format!("bad rational `{x}`"))))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        FlagBasis::new(vectors).map_err(D::Error::custom)
    }
}

impl Serialize for FlagBasis<f64> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.vectors.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlagBasis<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        FlagBasis::new(rows).map_err(D::Error::custom)
    }
}
