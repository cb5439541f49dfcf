//! The flip chart and the twist chart of the decorated PGL3 moduli space of the once-punctured
//! torus, their exchange relations, potentials, and twist limits.

use rand::Rng;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{ln_abs_rational, parse_rational, rational_to_string, Rational, Scalar};

#[derive(Deserialize)]
#[serde(untagged)]
enum CoordRepr {
    Int(i64),
    Float(f64),
    Text(String),
}

impl CoordRepr {
    fn to_rational(&self) -> Option<Rational> {
        match self {
            CoordRepr::Int(v) => Some(Rational::from_integer((*v).into())),
            CoordRepr::Float(v) => v.is_finite().then(|| parse_rational(&format!("{v}"))).flatten(),
            CoordRepr::Text(s) => parse_rational(s),
        }
    }
}

fn require_positive<S: Scalar>(names: &[&str], values: &[S]) -> Result<()> {
    for (name, v) in names.iter().zip(values) {
        if !v.is_positive() {
            return Err(Error::NonPositive(format!("coordinate {name} = {} must be > 0", v.to_f64())));
        }
    }
    Ok(())
}

macro_rules! chart_serde {
    ($ty:ident, $name:literal, [$($field:ident),*]) => {
        impl Serialize for $ty<Rational> {
            fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
                let mut st = s.serialize_struct($name, 8)?;
                $(st.serialize_field(stringify!($field), &rational_to_string(&self.$field))?;)*
                st.end()
            }
        }

        impl Serialize for $ty<f64> {
            fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
                let mut st = s.serialize_struct($name, 8)?;
                $(st.serialize_field(stringify!($field), &self.$field)?;)*
                st.end()
            }
        }

        impl<'de> Deserialize<'de> for $ty<Rational> {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Raw {
                    $($field: CoordRepr,)*
                }
                let raw = Raw::deserialize(d)?;
                $(let $field = raw.$field.to_rational().ok_or_else(|| {
                    D::Error::custom(concat!("coordinate `", stringify!($field), "` is not a finite rational"))
                })?;)*
                $ty::new($($field),*).map_err(D::Error::custom)
            }
        }
    };
}

/// Coordinates `(a, b, c, d, r, s, q, w)` of the flip chart; the flip exchanges the diagonal
/// coordinates `r, s, q, w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlipSeed<S> {
    a: S,
    b: S,
    c: S,
    d: S,
    r: S,
    s: S,
    q: S,
    w: S,
}

chart_serde!(FlipSeed, "FlipSeed", [a, b, c, d, r, s, q, w]);

impl<S: Scalar> FlipSeed<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: S, b: S, c: S, d: S, r: S, s: S, q: S, w: S) -> Result<Self> {
        let seed = FlipSeed { a, b, c, d, r, s, q, w };
        require_positive(&["a", "b", "c", "d", "r", "s", "q", "w"], &seed.coords())?;
        Ok(seed)
    }

    pub fn from_array(v: [S; 8]) -> Result<Self> {
        let [a, b, c, d, r, s, q, w] = v;
        Self::new(a, b, c, d, r, s, q, w)
    }

    /// `[a, b, c, d, r, s, q, w]`.
    pub fn coords(&self) -> [S; 8] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.r.clone(),
            self.s.clone(),
            self.q.clone(),
            self.w.clone(),
        ]
    }

    /// The four exchange relations applied in order; returns `(a, b, c, d, r', s', q', w')`.
    pub fn flip(&self) -> FlipSeed<S> {
        let (r2, s2, w2, q2) = self.exchanged();
        FlipSeed {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
            r: r2,
            s: s2,
            q: q2,
            w: w2,
        }
    }

    /// The flip followed by the relabeling that makes the new seed look like the old one again:
    /// `(a, b, d, c, q', w', r', s')`. This map is an involution.
    pub fn flip_relabeled(&self) -> FlipSeed<S> {
        let (r2, s2, w2, q2) = self.exchanged();
        FlipSeed {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.d.clone(),
            d: self.c.clone(),
            r: q2,
            s: w2,
            q: r2,
            w: s2,
        }
    }

    fn exchanged(&self) -> (S, S, S, S) {
        let FlipSeed { a, b, c, d, r, s, q, w } = self.clone();
        let r2 = (b.clone() * q.clone() + c.clone() * w.clone()) / r;
        let s2 = (a.clone() * w.clone() + d.clone() * q.clone()) / s;
        let w2 = (a * s2.clone() + c * r2.clone()) / w;
        let q2 = (b * r2.clone() + d * s2.clone()) / q;
        (r2, s2, w2, q2)
    }

    /// `(P₁ᵖ, P₂ᵖ)` in this chart.
    pub fn potentials(&self) -> (S, S) {
        let FlipSeed { a, b, c, d, r, s, q, w } = self.clone();
        let p1 = w.clone() / (b.clone() * r.clone())
            + q.clone() / (c.clone() * r.clone())
            + w.clone() / (d.clone() * s.clone())
            + q.clone() / (a.clone() * s.clone())
            + w.clone() / (a.clone() * c.clone())
            + q.clone() / (b.clone() * d.clone());
        let p2 = b.clone() * c.clone() / (a.clone() * w.clone())
            + r.clone() * d.clone() / (w.clone() * s.clone())
            + b.clone() * s.clone() / (w.clone() * r.clone())
            + a.clone() * d.clone() / (w.clone() * c.clone())
            + a.clone() * r.clone() / (b.clone() * w.clone())
            + c.clone() * s.clone() / (d.clone() * w.clone())
            + a.clone() * r.clone() / (s.clone() * q.clone())
            + c.clone() * b.clone() / (d.clone() * q.clone())
            + d.clone() * r.clone() / (c.clone() * q.clone())
            + b.clone() * s.clone() / (a.clone() * q.clone())
            + a.clone() * d.clone() / (b.clone() * q.clone())
            + c.clone() * s.clone() / (r.clone() * q.clone());
        (p1, p2)
    }

    /// `P₁ᵖ` written in the flipped coordinates:
    /// `r'/bc + s'/ad + s'/cw' + r'/aw' + r'/dq' + s'/bq'`.
    pub fn p1_after_flip(&self) -> S {
        let (r2, s2, w2, q2) = self.exchanged();
        let FlipSeed { a, b, c, d, .. } = self.clone();
        r2.clone() / (b.clone() * c.clone())
            + s2.clone() / (a.clone() * d.clone())
            + s2.clone() / (c * w2.clone())
            + r2.clone() / (a * w2)
            + r2 / (d * q2.clone())
            + s2 / (b * q2)
    }

    pub fn to_f64(&self) -> FlipSeed<f64> {
        let [a, b, c, d, r, s, q, w] = self.coords().map(|x| x.to_f64());
        FlipSeed { a, b, c, d, r, s, q, w }
    }
}

/// Horocycle potential of the once-punctured torus from λ-lengths: `2(x/yz + y/xz + z/xy)`.
pub fn lambda_length_potential<S: Scalar>(x: &S, y: &S, z: &S) -> S {
    let two = S::from_i64(2);
    two * (x.clone() / (y.clone() * z.clone())
        + y.clone() / (x.clone() * z.clone())
        + z.clone() / (x.clone() * y.clone()))
}

/// Moves between twist charts. On the underlying triangulation data `(h; γ, δ)`:
/// `Twist` is `(h; γ, γδ)`, `InverseTwist` is `(h; γ, γ⁻¹δ)`, `Rotate` is `(δh; δ⁻¹, δ⁻¹γ)` and
/// `Reverse` is `(γδh; γ⁻¹, γδ⁻¹γ⁻¹)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartMove {
    Twist,
    InverseTwist,
    Rotate,
    Reverse,
}

/// Coordinates `(a₁, a₂, b_{k−1}, c_{k−1}, c_k, b_k, d_{k−1}, e_{k−1})` of the twist chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistState<S> {
    a1: S,
    a2: S,
    b_prev: S,
    c_prev: S,
    c_cur: S,
    b_cur: S,
    d_prev: S,
    e_prev: S,
}

chart_serde!(TwistState, "TwistState", [a1, a2, b_prev, c_prev, c_cur, b_cur, d_prev, e_prev]);

/// Half-pants data of the curve carried by a twist chart.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPants<S> {
    pub p1_mu: S,
    pub p1_mu_prime: S,
    pub b1_mu: S,
    pub b1_mu_prime: S,
}

/// Corner characters of the two chart triangles at the cusp, named by `(vertex; from, to)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerCharacters<S> {
    /// `P(x; y, t)`.
    pub x_yt: S,
    /// `P(t; x, z) = P(t; x, y) + P(t; y, z)`.
    pub t_xz: S,
    /// `P(y; z, x) = P(y; z, t) + P(y; t, x)`.
    pub y_zx: S,
    /// `P(z; t, y)`.
    pub z_ty: S,
}

impl<S: Scalar> CornerCharacters<S> {
    pub fn total(&self) -> S {
        self.x_yt.clone() + self.t_xz.clone() + self.y_zx.clone() + self.z_ty.clone()
    }
}

impl<S: Scalar> TwistState<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a1: S, a2: S, b_prev: S, c_prev: S, c_cur: S, b_cur: S, d_prev: S, e_prev: S) -> Result<Self> {
        let st = TwistState { a1, a2, b_prev, c_prev, c_cur, b_cur, d_prev, e_prev };
        require_positive(&["a1", "a2", "b_prev", "c_prev", "c_cur", "b_cur", "d_prev", "e_prev"], &st.coords())?;
        Ok(st)
    }

    pub fn from_array(v: [S; 8]) -> Result<Self> {
        let [a1, a2, bp, cp, cc, bc, d, e] = v;
        Self::new(a1, a2, bp, cp, cc, bc, d, e)
    }

    /// The all-ones chart (the modular torus).
    pub fn ones() -> Self {
        let one = S::one();
        TwistState::from_array(std::array::from_fn(|_| one.clone())).expect("positive")
    }

    /// Fuchsian chart from λ-lengths `(x, y, z)`: `(x², x², z², z², y², y², xyz, xyz)`.
    pub fn fuchsian(x: &S, y: &S, z: &S) -> Result<Self> {
        let sq = |v: &S| v.clone() * v.clone();
        let xyz = x.clone() * y.clone() * z.clone();
        Self::new(sq(x), sq(x), sq(z), sq(z), sq(y), sq(y), xyz.clone(), xyz)
    }

    /// `[a₁, a₂, b_{k−1}, c_{k−1}, c_k, b_k, d_{k−1}, e_{k−1}]`.
    pub fn coords(&self) -> [S; 8] {
        [
            self.a1.clone(),
            self.a2.clone(),
            self.b_prev.clone(),
            self.c_prev.clone(),
            self.c_cur.clone(),
            self.b_cur.clone(),
            self.d_prev.clone(),
            self.e_prev.clone(),
        ]
    }

    pub fn a1(&self) -> &S {
        &self.a1
    }
    pub fn a2(&self) -> &S {
        &self.a2
    }
    pub fn b_prev(&self) -> &S {
        &self.b_prev
    }
    pub fn c_prev(&self) -> &S {
        &self.c_prev
    }
    pub fn c_cur(&self) -> &S {
        &self.c_cur
    }
    pub fn b_cur(&self) -> &S {
        &self.b_cur
    }
    pub fn d_prev(&self) -> &S {
        &self.d_prev
    }
    pub fn e_prev(&self) -> &S {
        &self.e_prev
    }

    /// `d_k = (a₂e_{k−1} + b_k d_{k−1})/b_{k−1}`.
    pub fn d_cur(&self) -> S {
        (self.a2.clone() * self.e_prev.clone() + self.b_cur.clone() * self.d_prev.clone()) / self.b_prev.clone()
    }

    /// `e_k = (c_k e_{k−1} + a₁d_{k−1})/c_{k−1}`.
    pub fn e_cur(&self) -> S {
        (self.c_cur.clone() * self.e_prev.clone() + self.a1.clone() * self.d_prev.clone()) / self.c_prev.clone()
    }

    /// One Dehn twist: computes `d_k, e_k, b_{k+1}, c_{k+1}` and shifts the index.
    pub fn twist_step(&self) -> Self {
        let d = self.d_cur();
        let e = self.e_cur();
        let b_next = (self.b_cur.clone() * d.clone() + self.a1.clone() * e.clone()) / self.d_prev.clone();
        let c_next = (e.clone() * self.c_cur.clone() + d.clone() * self.a2.clone()) / self.e_prev.clone();
        TwistState {
            a1: self.a1.clone(),
            a2: self.a2.clone(),
            b_prev: self.b_cur.clone(),
            c_prev: self.c_cur.clone(),
            c_cur: c_next,
            b_cur: b_next,
            d_prev: d,
            e_prev: e,
        }
    }

    /// Inverse of [`twist_step`](Self::twist_step).
    pub fn inverse_twist_step(&self) -> Self {
        let TwistState { a1, a2, b_prev: b, c_prev: c, c_cur: c2, b_cur: b2, d_prev: dk, e_prev: ek } = self.clone();
        let d = (b.clone() * dk.clone() + a1.clone() * ek.clone()) / b2;
        let e = (ek.clone() * c.clone() + dk.clone() * a2.clone()) / c2;
        let bp = (a2.clone() * e.clone() + b.clone() * d.clone()) / dk;
        let cp = (c.clone() * e.clone() + a1.clone() * d.clone()) / ek;
        TwistState { a1, a2, b_prev: bp, c_prev: cp, c_cur: c, b_cur: b, d_prev: d, e_prev: e }
    }

    /// Relabeling for the rotation move; of order 3.
    pub fn rotate(&self) -> Self {
        let s = self.clone();
        TwistState {
            a1: s.c_cur,
            a2: s.b_cur,
            b_prev: s.a1,
            c_prev: s.a2,
            c_cur: s.b_prev,
            b_cur: s.c_prev,
            d_prev: s.d_prev,
            e_prev: s.e_prev,
        }
    }

    /// Chart of the reversed orientation; an involution.
    pub fn reverse(&self) -> Self {
        let s = self.clone();
        TwistState {
            a1: s.a2,
            a2: s.a1,
            b_prev: s.c_prev,
            c_prev: s.b_prev,
            c_cur: s.b_cur,
            b_cur: s.c_cur,
            d_prev: s.e_prev,
            e_prev: s.d_prev,
        }
    }

    pub fn apply(&self, mv: ChartMove) -> Self {
        match mv {
            ChartMove::Twist => self.twist_step(),
            ChartMove::InverseTwist => self.inverse_twist_step(),
            ChartMove::Rotate => self.rotate(),
            ChartMove::Reverse => self.reverse(),
        }
    }

    pub fn apply_all(&self, moves: &[ChartMove]) -> Self {
        moves.iter().fold(self.clone(), |st, mv| st.apply(*mv))
    }

    /// First-character corners.
    pub fn corners_p1(&self) -> CornerCharacters<S> {
        let (a1, a2, _, _, cc, bc) = self.letters();
        let (d, e) = (self.d_prev.clone(), self.e_prev.clone());
        CornerCharacters {
            x_yt: d / (a1.clone() * bc.clone()),
            t_xz: self.d_cur() / (a2.clone() * bc),
            y_zx: self.e_cur() / (a1 * cc.clone()),
            z_ty: e / (a2 * cc),
        }
    }

    /// Second-character corners.
    pub fn corners_p2(&self) -> CornerCharacters<S> {
        let (a1, a2, bp, cp, cc, bc) = self.letters();
        let (d, e) = (self.d_prev.clone(), self.e_prev.clone());
        let x_yt = (cp.clone() * bc.clone() / cc.clone() + bp.clone() * a1.clone() / a2.clone()) / d.clone();
        let t_xy = (bc.clone() * a2.clone() / a1.clone() + cc.clone() * bp.clone() / cp.clone()) / d.clone();
        let t_yz = (a1.clone() * bp.clone() / cp.clone() + a2.clone() * bc.clone() / cc.clone()) / e.clone();
        let y_zt = (cc.clone() * a1.clone() / a2.clone() + bc.clone() * cp.clone() / bp.clone()) / e.clone();
        let y_tx = (a2.clone() * cp.clone() / bp.clone() + a1.clone() * cc.clone() / bc.clone()) / d;
        let z_ty = (bp * cc / bc + cp * a2 / a1) / e;
        CornerCharacters { x_yt, t_xz: t_xy + t_yz, y_zx: y_zt + y_tx, z_ty }
    }

    fn letters(&self) -> (S, S, S, S, S, S) {
        (
            self.a1.clone(),
            self.a2.clone(),
            self.b_prev.clone(),
            self.c_prev.clone(),
            self.c_cur.clone(),
            self.b_cur.clone(),
        )
    }

    /// `(P₁ᵖ, P₂ᵖ)` in this chart.
    pub fn potentials(&self) -> (S, S) {
        (self.corners_p1().total(), self.corners_p2().total())
    }

    /// Half-pants potentials and ratios of the curve carried by the chart.
    pub fn halfpants_potentials(&self) -> HalfPants<S> {
        let c = self.corners_p1();
        let total = c.total();
        let p1_mu = c.x_yt + c.t_xz;
        let p1_mu_prime = total.clone() - p1_mu.clone();
        HalfPants { b1_mu: p1_mu.clone() / total.clone(), b1_mu_prime: p1_mu_prime.clone() / total, p1_mu, p1_mu_prime }
    }

    /// `B₂(μ′) = (P₂(z;t,y) + P₂(y;z,x))/P₂ᵖ`.
    pub fn b2_mu_prime(&self) -> S {
        let c = self.corners_p2();
        let total = c.total();
        (c.z_ty + c.y_zx) / total
    }

    /// The four corner relations pairing the first and second characters; each entry is
    /// `(left, right)` and the sides agree exactly.
    pub fn extra_symmetries(&self) -> [(S, S); 4] {
        let (c1, c2) = (self.corners_p1(), self.corners_p2());
        let (p1, p2) = (c1.total(), c2.total());
        [
            (c1.z_ty.clone() / p1.clone(), c2.x_yt.clone() / p2.clone()),
            (c2.z_ty / p2.clone(), c1.x_yt / p1.clone()),
            (c1.y_zx / p1.clone(), c2.t_xz.clone() / p2.clone()),
            (c2.y_zx / p2, c1.t_xz / p1),
        ]
    }

    /// Triple ratios of the two chart triangles, `T(x,y,t)` and `T(y,z,t) = 1/T(x,y,t)`.
    pub fn triangle_triple_ratios(&self) -> (S, S) {
        let (a1, a2, bp, cp, cc, bc) = self.letters();
        let t = bc * cp * a2 / (a1 * cc * bp);
        (t.clone(), S::one() / t)
    }

    /// Flip-chart coordinates `(a, b, c, d, r, s, q, w) = (c_k, b_k, c_{k−1}, b_{k−1}, a₁, a₂, e_{k−1}, d_{k−1})`.
    pub fn to_flip_seed(&self) -> FlipSeed<S> {
        let s = self.clone();
        FlipSeed { a: s.c_cur, b: s.b_cur, c: s.c_prev, d: s.b_prev, r: s.a1, s: s.a2, q: s.e_prev, w: s.d_prev }
    }

    pub fn to_f64(&self) -> TwistState<f64> {
        let [a1, a2, b_prev, c_prev, c_cur, b_cur, d_prev, e_prev] = self.coords().map(|x| x.to_f64());
        TwistState { a1, a2, b_prev, c_prev, c_cur, b_cur, d_prev, e_prev }
    }

    /// Multiplies `b, c, d, e` by `(s_b, 1/s_b, s_d, s_b s_d)`, a symmetry of the exchange relations.
    fn rescaled(&self, s_b: S, s_d: S) -> Self {
        let s_e = s_b.clone() * s_d.clone();
        TwistState {
            a1: self.a1.clone(),
            a2: self.a2.clone(),
            b_prev: self.b_prev.clone() * s_b.clone(),
            c_prev: self.c_prev.clone() / s_b.clone(),
            c_cur: self.c_cur.clone() / s_b.clone(),
            b_cur: self.b_cur.clone() * s_b,
            d_prev: self.d_prev.clone() * s_d,
            e_prev: self.e_prev.clone() * s_e,
        }
    }

    fn scaled(&self, s: &S) -> Self {
        let v = self.coords().map(|x| x * s.clone());
        TwistState::from_array(v).expect("positive rescaling of a positive chart")
    }
}

impl TwistState<Rational> {
    /// Random chart with coordinates in `[lo, hi]` and denominators at most `max_den`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, lo: &Rational, hi: &Rational, max_den: i64) -> Result<Self> {
        let coords: Vec<Rational> = (0..8).map(|_| random_rational(rng, lo, hi, max_den)).collect::<Result<_>>()?;
        TwistState::from_array(coords.try_into().expect("eight coordinates"))
    }
}

impl FlipSeed<Rational> {
    /// Random seed with coordinates in `[lo, hi]` and denominators at most `max_den`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, lo: &Rational, hi: &Rational, max_den: i64) -> Result<Self> {
        let coords: Vec<Rational> = (0..8).map(|_| random_rational(rng, lo, hi, max_den)).collect::<Result<_>>()?;
        FlipSeed::from_array(coords.try_into().expect("eight coordinates"))
    }
}

/// Uniform choice of a denominator in `1..=max_den`, then of a numerator keeping the value in `[lo, hi]`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, lo: &Rational, hi: &Rational, max_den: i64) -> Result<Rational> {
    if lo > hi || max_den < 1 {
        return Err(Error::InvalidInput("empty sampling range".into()));
    }
    loop {
        let q = rng.gen_range(1..=max_den);
        let qq = Rational::from_integer(q.into());
        let p_lo = (lo * &qq).ceil().to_integer();
        let p_hi = (hi * &qq).floor().to_integer();
        if p_lo > p_hi {
            continue;
        }
        let span: i64 = (&p_hi - &p_lo).try_into().map_err(|_| Error::InvalidInput("range too wide".into()))?;
        let p = p_lo + num::BigInt::from(rng.gen_range(0..=span));
        return Ok(Rational::new(p, q.into()));
    }
}

/// Limits extracted from the twist orbit of a chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistLimits {
    /// Last `d_{k+1}/d_k`, which tends to `λ₁`.
    pub lambda1: f64,
    /// Last `c_{k+1}/c_k`, which tends to `λ₁λ₂`.
    pub lambda1_lambda2: f64,
    /// `(a₁/a₂)·λ₁λ₂/λ₁`, which tends to the triple ratio at the curve.
    pub triple_ratio: f64,
    /// Largest relative gap between the last two `d` ratios and the last two `c` ratios.
    pub cauchy_gap: f64,
    pub iterations: usize,
    /// The orbit stopped early because the next step would leave the floating range.
    pub saturated: bool,
    pub d_ratios: Vec<f64>,
    pub b_ratios: Vec<f64>,
    pub c_ratios: Vec<f64>,
    pub e_ratios: Vec<f64>,
}

/// Exact steps taken before switching to floating point.
pub const TWIST_EXACT_WARMUP: usize = 3;
/// Default stopping tolerance on consecutive `d` ratios.
pub const TWIST_CAUCHY_TOL: f64 = 1e-10;
/// Default iteration cap.
pub const TWIST_MAX_ITERATIONS: usize = 200;

fn cauchy_gap(out: &TwistLimits) -> f64 {
    let last = |v: &[f64]| {
        let n = v.len();
        (v[n - 1] - v[n - 2]).abs() / v[n - 1].abs()
    };
    last(&out.d_ratios).max(last(&out.c_ratios))
}

/// Runs `iterations` twist steps and reports the ratio sequences and their last values.
pub fn twist_limits(st: &TwistState<Rational>, iterations: usize) -> Result<TwistLimits> {
    twist_limits_until(st, iterations, 0.0)
}

/// Runs twist steps until consecutive `d` and `c` ratios differ by at most `tol` (relative) or `cap`
/// steps have been taken.
pub fn twist_limits_until(st: &TwistState<Rational>, cap: usize, tol: f64) -> Result<TwistLimits> {
    if cap < 2 {
        return Err(Error::InvalidInput("twist limits need at least 2 iterations".into()));
    }
    let mut out = TwistLimits {
        lambda1: 0.0,
        lambda1_lambda2: 0.0,
        triple_ratio: 0.0,
        cauchy_gap: f64::INFINITY,
        iterations: 0,
        saturated: false,
        d_ratios: Vec::new(),
        b_ratios: Vec::new(),
        c_ratios: Vec::new(),
        e_ratios: Vec::new(),
    };
    let record = |out: &mut TwistLimits, cur: &TwistState<f64>| -> Option<TwistState<f64>> {
        let next = cur.twist_step();
        let ratios =
            [next.d_prev / cur.d_prev, next.e_prev / cur.e_prev, next.b_cur / cur.b_cur, next.c_cur / cur.c_cur];
        let finite = next.coords().iter().chain(&ratios).all(|x| x.is_finite() && *x > 0.0);
        if !finite {
            return None;
        }
        out.d_ratios.push(ratios[0]);
        out.e_ratios.push(ratios[1]);
        out.b_ratios.push(ratios[2]);
        out.c_ratios.push(ratios[3]);
        out.iterations += 1;
        Some(next)
    };
    let mut exact = st.clone();
    let warm = TWIST_EXACT_WARMUP.min(cap);
    for _ in 0..warm {
        let next = exact.twist_step();
        let (cur, nxt) = (exact.to_f64(), next.to_f64());
        out.d_ratios.push(nxt.d_prev / cur.d_prev);
        out.e_ratios.push(nxt.e_prev / cur.e_prev);
        out.b_ratios.push(nxt.b_cur / cur.b_cur);
        out.c_ratios.push(nxt.c_cur / cur.c_cur);
        out.iterations += 1;
        exact = next;
    }
    let one = Rational::from_i64(1);
    let frame = exact.rescaled(&one / exact.b_prev(), &one / exact.d_prev());
    let mut cur = frame.scaled(&(&one / frame.a1())).to_f64();
    while out.iterations < cap {
        cur = cur.rescaled(1.0 / cur.b_prev, 1.0 / cur.d_prev);
        match record(&mut out, &cur) {
            Some(next) => cur = next,
            None => {
                out.saturated = true;
                break;
            }
        }
        let gap = cauchy_gap(&out);
        out.cauchy_gap = gap;
        if tol > 0.0 && gap <= tol {
            break;
        }
    }
    let n = out.d_ratios.len();
    if n < 2 {
        return Err(Error::NoConvergence("twist orbit left the floating range".into()));
    }
    out.cauchy_gap = cauchy_gap(&out);
    out.lambda1 = out.d_ratios[n - 1];
    out.lambda1_lambda2 = out.c_ratios[n - 1];
    out.triple_ratio = (ln_abs_rational(&st.a1) - ln_abs_rational(&st.a2)).exp() * out.lambda1_lambda2 / out.lambda1;
    if !out.lambda1.is_finite() || !out.lambda1_lambda2.is_finite() {
        return Err(Error::NoConvergence("twist orbit left the floating range".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    fn ones() -> TwistState<Rational> {
        TwistState::ones()
    }

    #[test]
    fn flip_at_ones() {
        let seed = FlipSeed::from_array(std::array::from_fn(|_| rational(1, 1))).unwrap();
        let want: Vec<Rational> = [1, 1, 1, 1, 2, 2, 4, 4].iter().map(|&v| rational(v, 1)).collect();
        assert_eq!(seed.flip().coords().to_vec(), want);
        assert_eq!(seed.potentials(), (rational(6, 1), rational(12, 1)));
        assert_eq!(seed.flip_relabeled().flip_relabeled(), seed);
    }

    #[test]
    fn lambda_length_potential_at_ones() {
        assert_eq!(lambda_length_potential(&rational(1, 1), &rational(1, 1), &rational(1, 1)), rational(6, 1));
    }

    #[test]
    fn twist_step_at_ones() {
        let st = ones().twist_step();
        let want: Vec<Rational> = [1, 1, 1, 1, 4, 4, 2, 2].iter().map(|&v| rational(v, 1)).collect();
        assert_eq!(st.coords().to_vec(), want);
        let bs: Vec<Rational> = (0..3)
            .scan(ones(), |s, _| {
                let b = s.b_cur().clone();
                *s = s.twist_step();
                Some(b)
            })
            .collect();
        assert_eq!(bs, vec![rational(1, 1), rational(4, 1), rational(25, 1)]);
        assert_eq!(ones().twist_step().twist_step().twist_step().b_cur(), &rational(169, 1));
    }

    #[test]
    fn moves_have_expected_orders() {
        let st = TwistState::from_array([2, 3, 5, 7, 11, 13, 17, 19].map(|v| rational(v, 1))).unwrap();
        assert_eq!(st.twist_step().inverse_twist_step(), st);
        assert_eq!(st.inverse_twist_step().twist_step(), st);
        assert_eq!(st.rotate().rotate().rotate(), st);
        assert_eq!(st.reverse().reverse(), st);
    }

    #[test]
    fn potentials_agree_between_charts() {
        let st = TwistState::from_array([2, 3, 5, 7, 11, 13, 17, 19].map(|v| rational(v, 1))).unwrap();
        assert_eq!(st.potentials().0, st.to_flip_seed().potentials().0);
        assert_eq!(st.potentials().1, st.to_flip_seed().potentials().1);
        assert_eq!(ones().potentials(), (rational(6, 1), rational(12, 1)));
    }

    #[test]
    fn corner_oracle() {
        let st = TwistState::from_array([2, 3, 5, 7, 11, 13, 17, 19].map(|v| rational(v, 1))).unwrap();
        let c = st.corners_p1();
        assert_eq!(c.t_xz, st.d_cur() / (st.a2().clone() * st.b_cur().clone()));
    }

    #[test]
    fn halfpants_at_ones() {
        let hp = ones().halfpants_potentials();
        assert_eq!(hp.b1_mu, rational(1, 2));
        assert_eq!(hp.b1_mu_prime, rational(1, 2));
        assert_eq!(hp.p1_mu, rational(3, 1));
    }

    #[test]
    fn twist_ratio_sequence_at_ones() {
        let lim = twist_limits(&ones(), 40).unwrap();
        assert_eq!(&lim.d_ratios[..3], &[2.0, 5.0, 6.5]);
        assert!((lim.d_ratios[3] - 6.8).abs() < 1e-12);
        let lambda = ((3.0 + 5f64.sqrt()) / 2.0).powi(2);
        assert!((lim.lambda1 - lambda).abs() < 1e-9);
        assert!((lim.triple_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let st = TwistState::from_array([2, 3, 5, 7, 11, 13, 17, 19].map(|v| rational(v, 1))).unwrap();
        let text = serde_json::to_string(&st).unwrap();
        let back: TwistState<Rational> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, st);
        let parsed: TwistState<Rational> = serde_json::from_str(
            r#"{"a1":1,"a2":"3/2","b_prev":0.5,"c_prev":1,"c_cur":1,"b_cur":1,"d_prev":1,"e_prev":1}"#,
        )
        .unwrap();
        assert_eq!(parsed.a2(), &rational(3, 2));
        assert_eq!(parsed.b_prev(), &rational(1, 2));
        assert!(serde_json::from_str::<TwistState<Rational>>(r#"{"a1":0}"#).is_err());
        let zero = r#"{"a1":0,"a2":1,"b_prev":1,"c_prev":1,"c_cur":1,"b_cur":1,"d_prev":1,"e_prev":1}"#;
        assert!(serde_json::from_str::<TwistState<Rational>>(zero).is_err());
    }
}
