//! Small dense matrices over a commutative local ring.
//!
//! Everything here is division-free except [`Matrix::inverse`], which only
//! needs the determinant to be a unit. Characteristic polynomials use
//! Berkowitz's algorithm so that they stay exact modulo p^M.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::witt::WittElement;

/// Commutative ring operations, with the ring carried by the values.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_int_like(&self, v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn unit_inverse(&self) -> Option<Self>;
}

/// The Frobenius lift acting on coefficients.
pub trait Frobenius {
    fn frob(&self) -> Self;
}

impl Ring for WittElement {
    fn zero_like(&self) -> Self {
        WittElement::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        WittElement::one(self.ring())
    }
    fn from_int_like(&self, v: i64) -> Self {
        WittElement::from_int(self.ring(), v)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        WittElement::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        WittElement::is_unit(self)
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.inverse()
    }
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn from_int_like(&self, v: i64) -> Self {
        BigInt::from(v)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn unit_inverse(&self) -> Option<Self> {
        Ring::is_unit(self).then(|| self.clone())
    }
}

impl Frobenius for WittElement {
    fn frob(&self) -> Self {
        self.frobenius()
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    /// prototype element fixing the coefficient ring, also used for empty matrices
    proto: T,
    data: Vec<T>,
}

pub type WittMatrix = Matrix<WittElement>;

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, proto: &T) -> Self {
        let z = proto.zero_like();
        Matrix { rows, cols, proto: z.clone(), data: vec![z; rows * cols] }
    }

    pub fn identity(n: usize, proto: &T) -> Self {
        let mut m = Self::zeros(n, n, proto);
        for i in 0..n {
            m.data[i * n + i] = proto.one_like();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, proto: &T, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, proto: proto.zero_like(), data }
    }

    /// Rows must be nonempty and of equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let proto = rows.first()?.first()?.zero_like();
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix { rows: n, cols, proto, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n, &entries[0]);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn proto(&self) -> &T {
        &self.proto
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U, proto: &U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, proto: proto.zero_like(), data: self.data.iter().map(f).collect() }
    }

    pub fn map_same(&self, f: impl Fn(&T) -> T) -> Self {
        let proto = f(&self.proto);
        Matrix { rows: self.rows, cols: self.cols, proto: proto.zero_like(), data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, &self.proto, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, &self.proto, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, &self.proto, |i, j| self.get(i, j).sub(o.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        self.map_same(Ring::neg)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_same(|x| c.mul(x))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, o.cols, &self.proto);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::identity(self.rows, &self.proto);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    pub fn trace(&self) -> T {
        (0..self.rows).fold(self.proto.zero_like(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), &self.proto, |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<T>], proto: &T) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), proto, |i, j| cols[j][i].clone())
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, &self.proto, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, o: &Self) -> Self {
        let (r, c) = (self.rows + o.rows, self.cols + o.cols);
        Self::from_fn(r, c, &self.proto, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                self.proto.zero_like()
            }
        })
    }

    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, &self.proto, |i, j| {
            self.get(i / o.rows, j / o.cols).mul(o.get(i % o.rows, j % o.cols))
        })
    }

    /// Coefficients c_0..c_n (low degree first) of det(t I - A).
    pub fn char_poly(&self) -> Vec<T> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let one = self.proto.one_like();
        // v holds the char poly of the leading r x r block, highest degree first
        let mut v = vec![one.clone()];
        for r in 0..n {
            let a = self.get(r, r);
            let mut toeplitz = Vec::with_capacity(r + 2);
            toeplitz.push(one.clone());
            toeplitz.push(a.neg());
            // R A_r^k C for k = 0..r-1
            let mut w: Vec<T> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let rw = (0..r).fold(self.proto.zero_like(), |acc, j| acc.add(&self.get(r, j).mul(&w[j])));
                toeplitz.push(rw.neg());
                w = (0..r)
                    .map(|i| (0..r).fold(self.proto.zero_like(), |acc, j| acc.add(&self.get(i, j).mul(&w[j]))))
                    .collect();
            }
            let mut next = vec![self.proto.zero_like(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate().take(i.min(r) + 1) {
                    *slot = slot.add(&toeplitz[i - j].mul(vj));
                }
            }
            v = next;
        }
        v.reverse();
        v
    }

    pub fn det(&self) -> T {
        let cp = self.char_poly();
        if self.rows % 2 == 0 {
            cp[0].clone()
        } else {
            cp[0].neg()
        }
    }

    /// Adjugate via Cayley-Hamilton, valid over any commutative ring.
    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        if n == 0 {
            return self.clone();
        }
        let cp = self.char_poly();
        let mut s = Self::identity(n, &self.proto);
        for c in cp[1..n].iter().rev() {
            s = s.mul(self);
            for i in 0..n {
                let v = s.get(i, i).add(c);
                s.set(i, i, v);
            }
        }
        if n % 2 == 0 {
            s.neg()
        } else {
            s
        }
    }

    /// Inverse when the determinant is a unit.
    pub fn inverse(&self) -> Option<Self> {
        let dinv = self.det().unit_inverse()?;
        Some(self.adjugate().scale(&dinv))
    }

    /// k-th compound matrix (matrix of the k-th exterior power) on the
    /// lexicographically ordered basis of k-subsets.
    pub fn compound(&self, k: usize) -> Self {
        let rs: Vec<Vec<usize>> = (0..self.rows).combinations(k).collect();
        let cs: Vec<Vec<usize>> = (0..self.cols).combinations(k).collect();
        Self::from_fn(rs.len(), cs.len(), &self.proto, |i, j| self.submatrix(&rs[i], &cs[j]).det())
    }

    /// Evaluate a polynomial (coefficients low degree first) at the matrix.
    pub fn eval_poly(&self, poly: &[T]) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(n, n, &self.proto);
        for c in poly.iter().rev() {
            acc = acc.mul(self).add(&Self::identity(n, &self.proto).scale(c));
        }
        acc
    }
}

impl<T: Ring + Frobenius> Matrix<T> {
    pub fn frob(&self) -> Self {
        self.map_same(|x| x.frob())
    }

    pub fn frob_pow(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.frob())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

/// Serialized form of a Witt matrix: ring plus rows of coordinate vectors.
#[derive(Serialize, Deserialize)]
pub struct WittMatrixRepr {
    pub ring: super::ring::RingSpec,
    pub rows: Vec<Vec<Vec<i64>>>,
}

impl Serialize for WittMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.coords().iter().map(|&c| c as i64).collect()).collect())
            .collect();
        WittMatrixRepr { ring: self.proto.ring().clone(), rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WittMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = WittMatrixRepr::deserialize(d)?;
        let ring = repr.ring;
        let rows = repr
            .rows
            .iter()
            .map(|r| r.iter().map(|c| WittElement::from_coords(&ring, c)).collect::<crate::Result<Vec<_>>>())
            .collect::<crate::Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Matrix::from_rows(rows).ok_or_else(|| D::Error::custom("matrix rows must be nonempty and equal length"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::RingSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(ring: &RingSpec, n: usize, rng: &mut ChaCha8Rng) -> WittMatrix {
        let proto = WittElement::zero(ring);
        Matrix::from_fn(n, n, &proto, |_, _| {
            let c: Vec<i64> = (0..ring.residue_degree()).map(|_| rng.gen_range(0..ring.pm() as i64)).collect();
            WittElement::from_coords(ring, &c).unwrap()
        })
    }

    fn ints(ring: &RingSpec, v: &[i64]) -> Vec<WittElement> {
        v.iter().map(|&x| WittElement::from_int(ring, x)).collect()
    }

    #[test]
    fn char_poly_small_cases() {
        let r = RingSpec::new(5, 1, 1, 4).unwrap();
        let one = WittElement::one(&r);
        assert_eq!(Matrix::identity(2, &one).char_poly(), ints(&r, &[1, -2, 1]));
        let d = Matrix::diagonal(&ints(&r, &[1, 5]));
        assert_eq!(d.char_poly(), ints(&r, &[5, -6, 1]));
    }

    #[test]
    fn cayley_hamilton_and_adjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, f, d) in [(5u64, 1u32, 1u32), (3, 1, 2), (2, 2, 1)] {
            let r = RingSpec::new(p, f, d, 5).unwrap();
            for n in 1..=6 {
                let a = random_matrix(&r, n, &mut rng);
                assert!(a.eval_poly(&a.char_poly()).is_zero(), "Cayley-Hamilton fails for n={n}");
                let prod = a.mul(&a.adjugate());
                let det = a.det();
                assert_eq!(prod, Matrix::identity(n, &det).scale(&det));
            }
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = RingSpec::new(7, 1, 2, 4).unwrap();
        for n in 1..=4 {
            let a = random_matrix(&r, n, &mut rng);
            let b = random_matrix(&r, n, &mut rng);
            assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
        }
    }

    #[test]
    fn compound_is_multiplicative_and_top_compound_is_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let r = RingSpec::new(3, 1, 1, 6).unwrap();
        let a = random_matrix(&r, 4, &mut rng);
        let b = random_matrix(&r, 4, &mut rng);
        assert_eq!(a.mul(&b).compound(2), a.compound(2).mul(&b.compound(2)));
        assert_eq!(a.compound(4).get(0, 0), &a.det());
        assert_eq!(a.compound(1), a);
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let r = RingSpec::new(5, 1, 2, 5).unwrap();
        let mut found = 0;
        while found < 5 {
            let a = random_matrix(&r, 3, &mut rng);
            if let Some(inv) = a.inverse() {
                assert_eq!(a.mul(&inv), Matrix::identity(3, a.proto()));
                found += 1;
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let r = RingSpec::new(3, 1, 2, 3).unwrap();
        let m = Matrix::from_rows(vec![
            vec![WittElement::from_coords(&r, &[1, 2]).unwrap(), WittElement::from_int(&r, 3)],
            vec![WittElement::zero(&r), WittElement::one(&r)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: WittMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
