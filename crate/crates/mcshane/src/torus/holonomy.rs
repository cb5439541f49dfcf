use crate::cluster::TwistState;
use crate::error::{Error, Result};
use crate::flags::FlagBasis;
use crate::numerics::{cross3, det, dot, Matrix, Rational, Scalar};

use super::curves::{CurveWord, Letter};

/// Sign convention relating the quad determinants to the `d`, `e` coordinates.
const SIGMA: i64 = -1;

/// A decorated flag of `ℝ³` as a point `u` and a covector `φ` with `φ(u) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointLine<S> {
    pub u: Vec<S>,
    pub phi: Vec<S>,
}

impl<S: Scalar> PointLine<S> {
    /// `(Mu, φM⁻¹)`.
    pub fn transform(&self, m: &Matrix<S>, m_inv: &Matrix<S>) -> Self {
        PointLine { u: m.mul_vec(&self.u), phi: m_inv.vec_mul(&self.phi) }
    }

    pub fn flag(&self) -> Result<FlagBasis<S>> {
        FlagBasis::from_point_line(&self.u, &self.phi)
    }
}

/// Holonomy `ρ(A)`, `ρ(B)` of a positive structure together with the decorated cusp flag `X`.
/// The four flags around the base quadrilateral are `X`, `Y = ρ(B)X`, `T = ρ(A)X`, `Z = ρ(AB)X`.
#[derive(Clone, Debug)]
pub struct HolonomyRep<S> {
    a: Matrix<S>,
    b: Matrix<S>,
    a_inv: Matrix<S>,
    b_inv: Matrix<S>,
    cusp: PointLine<S>,
}

fn mapping<S: Scalar>(p: &PointLine<S>, q: &PointLine<S>, r: &PointLine<S>, s: &PointLine<S>) -> Result<Matrix<S>> {
    let k_pq = cross3(&p.phi, &q.phi);
    let k_rs = cross3(&r.phi, &s.phi);
    let src = vec![p.u.clone(), q.u.clone(), k_pq];
    let d_src = det(&src)?;
    let d_dst = det(&[r.u.clone(), s.u.clone(), k_rs.clone()])?;
    if d_src.is_zero() || d_dst.is_zero() {
        return Err(Error::Singular);
    }
    let c = d_src / d_dst;
    let dst = Matrix::from_cols(&[r.u.clone(), s.u.clone(), k_rs.into_iter().map(|x| x * c.clone()).collect()])?;
    Ok(dst.matmul(&Matrix::from_cols(&src)?.inverse()?))
}

impl<S: Scalar> HolonomyRep<S> {
    /// Rebuilds the holonomy from the eight coordinates of a chart.
    pub fn reconstruct(st: &TwistState<S>) -> Result<Self> {
        let z = S::zero;
        let sigma = S::from_i64(SIGMA);
        let (a1, a2, bp, cp, cc, bc) = (
            st.a1().clone(),
            st.a2().clone(),
            st.b_prev().clone(),
            st.c_prev().clone(),
            st.c_cur().clone(),
            st.b_cur().clone(),
        );
        let sd = sigma.clone() * st.d_prev().clone();
        let se = sigma * st.e_prev().clone();

        let x = PointLine { u: vec![S::one(), z(), z()], phi: vec![z(), bc.clone(), a1.clone() / sd.clone()] };
        let y = PointLine { u: vec![z(), S::one(), z()], phi: vec![cc.clone(), z(), cp / sd.clone()] };
        let t = PointLine { u: vec![z(), z(), sd], phi: vec![a2.clone(), bp, z()] };

        let u_z = Matrix::from_rows(vec![cross3(&t.u, &y.u), y.phi.clone(), t.phi.clone()])?.solve(&[se, a1, bc])?;
        let phi_z = Matrix::from_rows(vec![u_z.clone(), t.u.clone(), y.u.clone()])?.solve(&[z(), cc, a2])?;
        let zf = PointLine { u: u_z, phi: phi_z };

        let a = mapping(&x, &y, &t, &zf)?;
        let b = mapping(&x, &t, &y, &zf)?;
        let a_inv = a.inverse()?;
        let b_inv = b.inverse()?;
        Ok(HolonomyRep { a, b, a_inv, b_inv, cusp: x })
    }

    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<S> {
        &self.b
    }

    pub fn cusp(&self) -> &PointLine<S> {
        &self.cusp
    }

    pub fn cusp_flag(&self) -> Result<FlagBasis<S>> {
        self.cusp.flag()
    }

    pub fn letter(&self, l: Letter) -> &Matrix<S> {
        match l {
            Letter::A => &self.a,
            Letter::B => &self.b,
            Letter::InvA => &self.a_inv,
            Letter::InvB => &self.b_inv,
        }
    }

    /// `ρ(w)`, letters multiplied left to right.
    pub fn eval(&self, w: &CurveWord) -> Matrix<S> {
        w.letters().iter().fold(Matrix::identity(3), |acc, &l| acc.matmul(self.letter(l)))
    }

    /// `ρ([A, B]) = ρ(A)ρ(B)ρ(A)⁻¹ρ(B)⁻¹`.
    pub fn commutator(&self) -> Matrix<S> {
        self.a.matmul(&self.b).matmul(&self.a_inv).matmul(&self.b_inv)
    }

    /// The flags `X`, `Y`, `T`, `Z` obtained by moving the cusp flag with the holonomy.
    pub fn quad_flags(&self) -> [PointLine<S>; 4] {
        let x = self.cusp.clone();
        let y = x.transform(&self.b, &self.b_inv);
        let t = x.transform(&self.a, &self.a_inv);
        let z = y.transform(&self.a, &self.a_inv);
        [x, y, t, z]
    }

    /// The eight chart coordinates read off the equivariant flags.
    pub fn vertex_functions(&self) -> Result<TwistState<S>> {
        let [x, y, t, z] = self.quad_flags();
        let sigma = S::from_i64(SIGMA);
        let d = sigma.clone() * det(&[x.u.clone(), y.u.clone(), t.u.clone()])?;
        let e = sigma * det(&[y.u.clone(), z.u.clone(), t.u.clone()])?;
        TwistState::new(
            dot(&x.phi, &t.u),
            dot(&t.phi, &x.u),
            dot(&t.phi, &y.u),
            dot(&y.phi, &t.u),
            dot(&y.phi, &x.u),
            dot(&x.phi, &y.u),
            d,
            e,
        )
    }
}

impl HolonomyRep<Rational> {
    pub fn to_f64(&self) -> HolonomyRep<f64> {
        HolonomyRep {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            a_inv: self.a_inv.to_f64(),
            b_inv: self.b_inv.to_f64(),
            cusp: PointLine {
                u: self.cusp.u.iter().map(|x| x.to_f64()).collect(),
                phi: self.cusp.phi.iter().map(|x| x.to_f64()).collect(),
            },
        }
    }
}

/// Exact or floating holonomy reconstruction of a chart.
pub fn reconstruct_holonomy<S: Scalar>(st: &TwistState<S>) -> Result<HolonomyRep<S>> {
    HolonomyRep::reconstruct(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{log_spectrum_exact3, rational, Precision};
    use crate::torus::curves::{slope_to_word, CurveSlope, Orientation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(seed: u64) -> TwistState<Rational> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TwistState::random(&mut rng, &rational(1, 3), &rational(3, 1), 7).unwrap()
    }

    #[test]
    fn vertex_functions_round_trip_exactly() {
        for seed in 0..20 {
            let st = random_state(seed);
            let rep = reconstruct_holonomy(&st).unwrap();
            assert_eq!(rep.vertex_functions().unwrap(), st);
            assert_eq!(rep.a().det(), rational(1, 1));
            assert_eq!(rep.b().det(), rational(1, 1));
        }
    }

    #[test]
    fn float_round_trip_is_tight() {
        let st = random_state(99).to_f64();
        let rep = reconstruct_holonomy(&st).unwrap();
        let back = rep.vertex_functions().unwrap();
        for (x, y) in back.coords().iter().zip(st.coords()) {
            assert!((x - y).abs() <= 1e-10 * y.abs());
        }
    }

    #[test]
    fn commutator_is_unipotent() {
        for seed in 0..10 {
            let rep = reconstruct_holonomy(&random_state(seed)).unwrap();
            let n = rep.commutator().sub(&Matrix::identity(3));
            assert_eq!(n.pow(3), Matrix::zeros(3));
            assert_ne!(n, Matrix::zeros(3));
        }
        let rep = reconstruct_holonomy(&TwistState::<f64>::ones()).unwrap();
        let n = rep.commutator().sub(&Matrix::identity(3));
        assert!(n.pow(3).norm_inf() < 1e-8);
    }

    #[test]
    fn modular_torus_systole() {
        let rep = reconstruct_holonomy(&TwistState::<Rational>::ones()).unwrap();
        let a = rep.a();
        assert_eq!(a.trace(), rational(8, 1));
        let logs = log_spectrum_exact3(a, Precision::Double).unwrap();
        let want = 2.0 * (1.5f64).acosh();
        assert!((logs[0] - logs[1] - want).abs() < 1e-12);
        assert!((logs[1] - logs[2] - want).abs() < 1e-12);
    }

    #[test]
    fn primitive_words_are_loxodromic() {
        let rep = reconstruct_holonomy(&random_state(5)).unwrap();
        for s in crate::torus::enumerate_curves(6) {
            let m = rep.eval(&slope_to_word(&s));
            let l = log_spectrum_exact3(&m, Precision::Double).unwrap();
            assert!(l[0] > l[1] && l[1] > l[2], "{s}");
        }
        let w = slope_to_word(&CurveSlope::new(2, 3, Orientation::Positive).unwrap());
        assert_eq!(rep.eval(&w).matmul(&rep.eval(&w.inverse())), Matrix::identity(3));
    }
}
