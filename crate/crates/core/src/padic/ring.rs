//! Truncated unramified rings W(F_{p^n}) / p^M.
//!
//! Elements are coordinate vectors over Z/p^M in the basis 1, x, .., x^(n-1)
//! where x is a root of the (integer lift of the) residue modulus. The
//! q-power Frobenius lift is Hensel-lifted once per ring and cached as the
//! images of the basis vectors.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fp_poly;
use crate::error::{Error, Result};

/// Largest admissible p^M; products of two residues must fit in u128.
const MAX_MODULUS: u128 = 1 << 62;

#[derive(Clone)]
pub struct RingSpec(Arc<RingData>);

pub(crate) struct RingData {
    p: u64,
    f: u32,
    d: u32,
    precision: u32,
    n: usize,
    modulus: Vec<u64>,
    pm: u64,
    /// sigma[i] = coordinates of sigma(x^i)
    sigma: Vec<Vec<u64>>,
}

impl RingSpec {
    /// W(F_{q^d}) / p^M with q = p^f and the least irreducible residue modulus.
    pub fn new(p: u64, f: u32, d: u32, precision: u32) -> Result<Self> {
        Self::check_params(p, f, d, precision)?;
        let n = (f * d) as usize;
        let modulus = fp_poly::least_irreducible(p, n);
        Self::build(p, f, d, precision, modulus)
    }

    pub fn with_modulus(p: u64, f: u32, d: u32, precision: u32, modulus: Vec<u64>) -> Result<Self> {
        Self::check_params(p, f, d, precision)?;
        let n = (f * d) as usize;
        let modulus = fp_poly::trim(modulus.iter().map(|c| c % p).collect());
        if modulus.len() != n + 1 || modulus[n] != 1 {
            return Err(Error::config("modulus", format!("must be monic of degree f*d = {n}")));
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::config("modulus", "not irreducible over F_p"));
        }
        Self::build(p, f, d, precision, modulus)
    }

    fn check_params(p: u64, f: u32, d: u32, precision: u32) -> Result<()> {
        if !fp_poly::is_prime(p) {
            return Err(Error::config("p", format!("{p} is not prime")));
        }
        if f == 0 || d == 0 {
            return Err(Error::config("f/d", "degrees must be positive"));
        }
        if precision == 0 {
            return Err(Error::config("M", "precision must be at least 1"));
        }
        let pm = (p as u128).checked_pow(precision);
        if pm.map_or(true, |v| v >= MAX_MODULUS) {
            return Err(Error::config("M", format!("p^M = {p}^{precision} exceeds 2^62")));
        }
        Ok(())
    }

    fn build(p: u64, f: u32, d: u32, precision: u32, modulus: Vec<u64>) -> Result<Self> {
        let n = modulus.len() - 1;
        let pm = p.pow(precision);
        let mut data = RingData { p, f, d, precision, n, modulus, pm, sigma: Vec::new() };
        data.sigma = data.compute_sigma();
        Ok(RingSpec(Arc::new(data)))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn f(&self) -> u32 {
        self.0.f
    }
    pub fn d(&self) -> u32 {
        self.0.d
    }
    pub fn precision(&self) -> u32 {
        self.0.precision
    }
    /// Size of the Frobenius field, q = p^f.
    pub fn q(&self) -> u64 {
        self.0.p.pow(self.0.f)
    }
    /// Degree n = f*d of the residue field over F_p.
    pub fn residue_degree(&self) -> usize {
        self.0.n
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }
    /// p^M.
    pub fn pm(&self) -> u64 {
        self.0.pm
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::check_params(self.p(), self.f(), self.d(), precision)?;
        Self::build(self.p(), self.f(), self.d(), precision, self.0.modulus.clone())
    }

    /// The ring W(F_{q^d'}) / p^M over the same q.
    pub fn with_degree(&self, d: u32) -> Result<Self> {
        Self::new(self.p(), self.f(), d, self.precision())
    }

    pub fn same_as(&self, other: &RingSpec) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self == other
    }

    pub(crate) fn data(&self) -> &RingData {
        &self.0
    }
}

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (&self.0, &other.0);
        a.p == b.p && a.f == b.f && a.d == b.d && a.precision == b.precision && a.modulus == b.modulus
    }
}
impl Eq for RingSpec {}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W(F_{}^{}) mod {}^{} [q = {}]",
            self.p(),
            self.residue_degree(),
            self.p(),
            self.precision(),
            self.q()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct RingSpecRepr {
    p: u64,
    f: u32,
    d: u32,
    #[serde(rename = "M")]
    precision: u32,
    modulus: Vec<u64>,
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RingSpecRepr {
            p: self.p(),
            f: self.f(),
            d: self.d(),
            precision: self.precision(),
            modulus: self.0.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RingSpecRepr::deserialize(d)?;
        RingSpec::with_modulus(r.p, r.f, r.d, r.precision, r.modulus).map_err(serde::de::Error::custom)
    }
}

// Raw coordinate arithmetic. Every slice has length n with entries in [0, p^M).
impl RingData {
    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pm as u128) as u64
    }

    pub(crate) fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.pm {
                    s - self.pm
                } else {
                    s
                }
            })
            .collect()
    }

    pub(crate) fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| if x >= y { x - y } else { x + self.pm - y }).collect()
    }

    pub(crate) fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| if x == 0 { 0 } else { self.pm - x }).collect()
    }

    pub(crate) fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| self.mulmod(x, c)).collect()
    }

    pub(crate) fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.n;
        if n == 1 {
            return vec![self.mulmod(a[0], b[0])];
        }
        let mut prod = vec![0u128; 2 * n - 1];
        let pm = self.pm as u128;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] = (prod[i + j] + a[i] as u128 * b[j] as u128) % pm;
            }
        }
        // x^n = -(m_0 + m_1 x + .. + m_{n-1} x^{n-1})
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..n {
                let m = self.modulus[i] as u128;
                if m != 0 {
                    let t = c * m % pm;
                    prod[k - n + i] = (prod[k - n + i] + pm - t) % pm;
                }
            }
        }
        prod[..n].iter().map(|&c| c as u64).collect()
    }

    pub(crate) fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.n];
        v[0] = 1 % self.pm;
        v
    }

    pub(crate) fn pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut r = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub(crate) fn is_unit(&self, a: &[u64]) -> bool {
        a.iter().any(|&c| c % self.p != 0)
    }

    /// Inverse of a unit: u^(Q-2) is an inverse mod p, refined by Newton steps.
    pub(crate) fn inverse_unit(&self, a: &[u64]) -> Option<Vec<u64>> {
        if !self.is_unit(a) {
            return None;
        }
        let q_res = (self.p as u128).pow(self.n as u32);
        let mut y = self.pow(a, q_res - 2);
        let two = {
            let mut v = vec![0; self.n];
            v[0] = 2 % self.pm;
            v
        };
        for _ in 0..64 {
            let ay = self.mul(a, &y);
            if ay == self.one() {
                return Some(y);
            }
            y = self.mul(&y, &self.sub(&two, &ay));
        }
        None
    }

    /// Evaluate an integer polynomial (coefficients reduced mod p^M) at `x`.
    pub(crate) fn eval_int_poly(&self, poly: &[u64], x: &[u64]) -> Vec<u64> {
        let mut acc = vec![0; self.n];
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, x);
            acc[0] = (acc[0] + c % self.pm) % self.pm;
        }
        acc
    }

    /// Newton iteration for a root of `poly` lifting the simple root `approx` mod p.
    pub(crate) fn hensel_root(&self, poly: &[u64], approx: Vec<u64>) -> Option<Vec<u64>> {
        let deriv: Vec<u64> =
            poly.iter().enumerate().skip(1).map(|(i, &c)| self.mulmod(c, i as u64 % self.pm)).collect();
        let mut xi = approx;
        for _ in 0..128 {
            let h = self.eval_int_poly(poly, &xi);
            if h.iter().all(|&c| c == 0) {
                return Some(xi);
            }
            let dh = self.eval_int_poly(&deriv, &xi);
            let inv = self.inverse_unit(&dh)?;
            xi = self.sub(&xi, &self.mul(&h, &inv));
        }
        None
    }

    fn compute_sigma(&self) -> Vec<Vec<u64>> {
        let n = self.n;
        let mut x = vec![0u64; n];
        if n == 1 {
            // W(F_p): the only basis vector is 1
            return vec![self.one()];
        }
        x[1] = 1;
        let q = (self.p as u128).pow(self.f);
        let approx = self.pow(&x, q);
        let xi = self
            .hensel_root(&self.modulus, approx)
            .expect("residue modulus is separable, Hensel lifting cannot fail");
        let mut cols = Vec::with_capacity(n);
        let mut cur = self.one();
        for _ in 0..n {
            cols.push(cur.clone());
            cur = self.mul(&cur, &xi);
        }
        cols
    }

    pub(crate) fn frobenius(&self, a: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (o, &s) in out.iter_mut().zip(&self.sigma[i]) {
                *o = (*o + self.mulmod(ai, s)) % self.pm;
            }
        }
        out
    }
}
