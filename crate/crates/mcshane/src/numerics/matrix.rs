use std::ops::Mul;

use serde::{Serialize, Serializer};

use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn diagonal(values: &[S]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::DimensionMismatch(format!("matrix dimension {n} < 2")));
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!("row of length {} in {n}x{n} matrix", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { n, data })
    }

    pub fn from_cols(cols: &[Vec<S>]) -> Result<Self> {
        Ok(Self::from_rows(cols.to_vec())?.transpose())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn cols(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|j| self.col(j)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { n, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                data.push(acc);
            }
        }
        Matrix { n, data }
    }

    /// `M v` for a column vector.
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.n).map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], v)).collect()
    }

    /// `v M` for a row vector.
    pub fn vec_mul(&self, v: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|j| {
                let mut acc = S::zero();
                for (i, vi) in v.iter().enumerate() {
                    acc = acc + vi.clone() * self.get(i, j).clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::identity(self.n);
        for _ in 0..k {
            result = result.matmul(self);
        }
        result
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().map(|x| x.to_f64().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gaussian elimination; exact pivots for exact scalars, partial pivoting otherwise.
    pub fn det(&self) -> S {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = match pick_pivot(&a, n, col) {
                Some(p) => p,
                None => return S::zero(),
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let factor = a[r * n + col].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[r * n + j].clone() - factor.clone() * a[col * n + j].clone();
                    a[r * n + j] = v;
                }
            }
        }
        det
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs of length {} for {n}x{n} system", b.len())));
        }
        let inv = self.inverse()?;
        Ok(inv.mul_vec(b))
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let pivot = pick_pivot(&a, n, col).ok_or(Error::Singular)?;
            if a[pivot * n + col].is_negligible(scale) {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = a[col * n + j].clone() / p.clone();
                inv[col * n + j] = inv[col * n + j].clone() / p.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = a[r * n + j].clone() - factor.clone() * a[col * n + j].clone();
                    inv[r * n + j] = inv[r * n + j].clone() - factor.clone() * inv[col * n + j].clone();
                }
            }
        }
        Ok(Matrix { n, data: inv })
    }

    /// Elementary symmetric functions `e_0 = 1, e_1 = tr, ..., e_n = det` of the eigenvalues,
    /// so that the characteristic polynomial is `Σ (-1)^k e_k x^(n-k)`.
    pub fn char_poly_elementary(&self) -> Vec<S> {
        let n = self.n;
        let mut e = vec![S::one()];
        let mut m = Self::zeros(n);
        let mut c_prev = S::one();
        for k in 1..=n {
            let mut next = self.matmul(&m);
            for i in 0..n {
                let v = next.get(i, i).clone() + c_prev.clone();
                next.set(i, i, v);
            }
            m = next;
            let am = self.matmul(&m);
            let c = -am.trace() / S::from_i64(k as i64);
            let sign = if k % 2 == 0 { S::one() } else { -S::one() };
            e.push(sign * c.clone());
            c_prev = c;
        }
        e
    }

    /// True iff `(M - I)^n = 0` and `det M = 1`, within `tol` relative to `‖M‖^n` for floats.
    pub fn is_unipotent(&self, tol: f64) -> bool {
        let n = self.n;
        let nil = self.sub(&Self::identity(n));
        let p = nil.pow(n as u32);
        let scale = self.norm_inf().max(1.0).powi(n as i32);
        let det_err = self.det() - S::one();
        if S::EXACT {
            p.data.iter().all(|x| x.is_zero()) && det_err.is_zero()
        } else {
            p.norm_inf() <= tol * scale && det_err.to_f64().abs() <= tol * scale
        }
    }
}

impl Matrix<Rational> {
    /// Largest binary height among the entries.
    pub fn height_bits(&self) -> u64 {
        self.data.iter().map(super::scalar::rational_height_bits).max().unwrap_or(0)
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.matmul(rhs)
    }
}

impl<S: Scalar> Serialize for Matrix<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let rows: Vec<Vec<f64>> = self.rows().iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect();
        rows.serialize(serializer)
    }
}

fn pick_pivot<S: Scalar>(a: &[S], n: usize, col: usize) -> Option<usize> {
    if S::EXACT {
        (col..n).find(|&r| !a[r * n + col].is_zero())
    } else {
        let mut best: Option<(usize, S)> = None;
        for r in col..n {
            let v = a[r * n + col].abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((r, v));
            }
        }
        best.map(|(r, _)| r)
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn cross3<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    vec![
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Determinant of the matrix whose columns are `vectors`.
pub fn det<S: Scalar>(vectors: &[Vec<S>]) -> Result<S> {
    let n = vectors.len();
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors of lengths {:?}",
            n,
            vectors.iter().map(|v| v.len()).collect::<Vec<_>>()
        )));
    }
    if n == 1 {
        return Ok(vectors[0][0].clone());
    }
    Ok(Matrix::from_cols(vectors)?.det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::rational;

    fn q(p: i64) -> Rational {
        rational(p, 1)
    }

    fn e(i: usize) -> Vec<Rational> {
        (0..3).map(|k| q((k == i) as i64)).collect()
    }

    #[test]
    fn det_of_standard_and_swapped_frames() {
        assert_eq!(det(&[e(0), e(1), e(2)]).unwrap(), q(1));
        assert_eq!(det(&[e(0), e(2), e(1)]).unwrap(), q(-1));
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let cols = vec![vec![q(0), q(0), q(1)], vec![q(0), q(1), q(1)], vec![q(1), q(0), q(1)]];
        // cofactor expansion along the first row of [[0,0,1],[0,1,0],[1,1,1]]
        let m = &cols;
        let expected = m[0][0].clone() * (m[1][1].clone() * m[2][2].clone() - m[2][1].clone() * m[1][2].clone())
            - m[1][0].clone() * (m[0][1].clone() * m[2][2].clone() - m[2][1].clone() * m[0][2].clone())
            + m[2][0].clone() * (m[0][1].clone() * m[1][2].clone() - m[1][1].clone() * m[0][2].clone());
        assert_eq!(expected, q(-1));
        assert_eq!(det(&cols).unwrap(), q(-1));
    }

    #[test]
    fn det_rejects_ragged_input() {
        assert!(det(&[vec![q(1), q(0)], vec![q(0)]]).is_err());
        assert!(det(&[vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]]).is_err());
    }

    #[test]
    fn inverse_and_solve_round_trip() {
        let m =
            Matrix::from_rows(vec![vec![q(2), q(1), q(0)], vec![q(1), q(3), q(1)], vec![q(0), q(1), q(4)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(3));
        let x = m.solve(&[q(1), q(2), q(3)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(1), q(2), q(3)]);
        let sing = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert_eq!(sing.inverse(), Err(Error::Singular));
    }

    #[test]
    fn elementary_symmetric_functions() {
        let m = Matrix::diagonal(&[q(4), q(2), q(1)]);
        assert_eq!(m.char_poly_elementary(), vec![q(1), q(7), q(14), q(8)]);
        let f = Matrix::diagonal(&[2.0, 3.0, 5.0, 7.0]);
        let e = f.char_poly_elementary();
        assert!((e[4] - 210.0).abs() < 1e-9 && (e[1] - 17.0).abs() < 1e-12);
    }

    #[test]
    fn unipotent_detection() {
        assert!(Matrix::<Rational>::identity(3).is_unipotent(0.0));
        assert!(!Matrix::diagonal(&[q(2), q(1), rational(1, 2)]).is_unipotent(0.0));
        let u =
            Matrix::from_rows(vec![vec![q(1), q(5), q(-3)], vec![q(0), q(1), q(7)], vec![q(0), q(0), q(1)]]).unwrap();
        assert!(u.is_unipotent(0.0));
        assert!(u.to_f64().is_unipotent(1e-12));
        assert!(!Matrix::diagonal(&[2.0, 1.0, 0.5]).is_unipotent(1e-10));
    }
}
