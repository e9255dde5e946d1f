use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::ring::RingSpec;
use crate::error::{Error, Result};

/// p-adic valuation at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Val {
    Finite(u32),
    /// The element is 0 mod p^M: its valuation is only known to be >= M.
    AtLeast(u32),
}

impl Val {
    pub fn finite(self) -> Option<u32> {
        match self {
            Val::Finite(v) => Some(v),
            Val::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::AtLeast(m) => write!(f, ">={m}"),
        }
    }
}

/// An element of W(F_{q^d}) known modulo p^M.
#[derive(Clone, PartialEq, Eq)]
pub struct WittElement {
    ring: RingSpec,
    coeffs: Vec<u64>,
}

impl WittElement {
    pub fn zero(ring: &RingSpec) -> Self {
        WittElement { ring: ring.clone(), coeffs: vec![0; ring.residue_degree()] }
    }

    pub fn one(ring: &RingSpec) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn from_int(ring: &RingSpec, v: i64) -> Self {
        let mut e = Self::zero(ring);
        e.coeffs[0] = v.rem_euclid(ring.pm() as i64) as u64;
        e
    }

    /// Coordinates in the residue basis; missing trailing coordinates are 0.
    pub fn from_coords(ring: &RingSpec, coords: &[i64]) -> Result<Self> {
        let n = ring.residue_degree();
        if coords.len() > n {
            return Err(Error::config(
                "coords",
                format!("{} coordinates given, ring has degree {n}", coords.len()),
            ));
        }
        let pm = ring.pm() as i64;
        let mut e = Self::zero(ring);
        for (c, &v) in e.coeffs.iter_mut().zip(coords) {
            *c = v.rem_euclid(pm) as u64;
        }
        Ok(e)
    }

    /// p^k, or 0 when k >= M.
    pub fn p_power(ring: &RingSpec, k: u32) -> Self {
        let mut e = Self::zero(ring);
        if k < ring.precision() {
            e.coeffs[0] = ring.p().pow(k);
        }
        e
    }

    /// Teichmüller lift of the residue with the given F_p coordinates.
    pub fn teichmuller(ring: &RingSpec, residue: &[u64]) -> Self {
        let data = ring.data();
        let mut lift = vec![0u64; ring.residue_degree()];
        for (c, &r) in lift.iter_mut().zip(residue) {
            *c = r % ring.p();
        }
        // [a] = lim a~^(Q^k); Q^(M-1) suffices modulo p^M
        let q_res = (ring.p() as u128).pow(ring.residue_degree() as u32);
        for _ in 1..ring.precision() {
            lift = data.pow(&lift, q_res);
        }
        WittElement { ring: ring.clone(), coeffs: lift }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn coords(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coordinates reduced mod p.
    pub fn residue(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c % self.ring.p()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.ring.data().is_unit(&self.coeffs)
    }

    /// The element as an integer in [0, p^M) when it lies in the prime subring.
    pub fn to_integer(&self) -> Option<u64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn valuation(&self) -> Val {
        let p = self.ring.p();
        let m = self.ring.precision();
        let v = self
            .coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let mut c = c;
                let mut k = 0;
                while c % p == 0 {
                    c /= p;
                    k += 1;
                }
                k
            })
            .min();
        match v {
            Some(v) if v < m => Val::Finite(v),
            _ => Val::AtLeast(m),
        }
    }

    /// The q-power Frobenius lift.
    pub fn frobenius(&self) -> Self {
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().frobenius(&self.coeffs) }
    }

    pub fn frobenius_pow(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.frobenius())
    }

    pub fn inverse(&self) -> Option<Self> {
        let inv = self.ring.data().inverse_unit(&self.coeffs)?;
        Some(WittElement { ring: self.ring.clone(), coeffs: inv })
    }

    pub fn pow(&self, e: u128) -> Self {
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().pow(&self.coeffs, e) }
    }

    pub fn mul_int(&self, c: i64) -> Self {
        let c = c.rem_euclid(self.ring.pm() as i64) as u64;
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().scale(&self.coeffs, c) }
    }

    /// Exact division by p^k. The quotient is only known mod p^(M-k), so it is
    /// returned in `target`, which must have precision <= M - k.
    pub fn div_p_power(&self, k: u32, target: &RingSpec) -> Option<Self> {
        if target.precision() + k > self.ring.precision() {
            return None;
        }
        let pk = self.ring.p().pow(k);
        if self.coeffs.iter().any(|c| c % pk != 0) {
            return None;
        }
        let coeffs = self.coeffs.iter().map(|c| (c / pk) % target.pm()).collect();
        Some(WittElement { ring: target.clone(), coeffs })
    }

    /// Reinterpret in a ring with the same residue field and another precision:
    /// reduces when lowering, pads with zero p-adic digits when raising.
    pub fn with_ring(&self, target: &RingSpec) -> Self {
        debug_assert_eq!(target.modulus(), self.ring.modulus());
        let coeffs = self.coeffs.iter().map(|c| c % target.pm()).collect();
        WittElement { ring: target.clone(), coeffs }
    }

    fn check_ring(&self, other: &Self) {
        assert!(self.ring.same_as(&other.ring), "mixing elements of {:?} and {:?}", self.ring, other.ring);
    }
}

/// Serialized as its coordinate vector; the ring travels separately.
impl Serialize for WittElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl fmt::Debug for WittElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_integer() {
            write!(f, "{v}")
        } else {
            write!(f, "{:?}", self.coeffs)
        }
    }
}

impl Add for &WittElement {
    type Output = WittElement;
    fn add(self, o: &WittElement) -> WittElement {
        self.check_ring(o);
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().add(&self.coeffs, &o.coeffs) }
    }
}

impl Sub for &WittElement {
    type Output = WittElement;
    fn sub(self, o: &WittElement) -> WittElement {
        self.check_ring(o);
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().sub(&self.coeffs, &o.coeffs) }
    }
}

impl Mul for &WittElement {
    type Output = WittElement;
    fn mul(self, o: &WittElement) -> WittElement {
        self.check_ring(o);
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().mul(&self.coeffs, &o.coeffs) }
    }
}

impl Neg for &WittElement {
    type Output = WittElement;
    fn neg(self) -> WittElement {
        WittElement { ring: self.ring.clone(), coeffs: self.ring.data().neg(&self.coeffs) }
    }
}

/// Ring embedding W(F_{p^m}) -> W(F_{p^n}) for m | n, sending the small
/// ring's basis generator to the Hensel lift of a root of its modulus.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: RingSpec,
    target: RingSpec,
    /// images of x^i, i < m
    images: Vec<WittElement>,
}

impl Embedding {
    pub fn new(source: &RingSpec, target: &RingSpec) -> Result<Self> {
        let (m, n) = (source.residue_degree(), target.residue_degree());
        if source.p() != target.p() || n % m != 0 {
            return Err(Error::config("embedding", format!("no embedding of {source:?} into {target:?}")));
        }
        if source.precision() != target.precision() {
            return Err(Error::config("embedding", "precisions differ"));
        }
        let mut images = vec![WittElement::one(target)];
        if m > 1 {
            let root = residue_root(source.modulus(), target)
                .ok_or_else(|| Error::Inconsistency("residue modulus has no root in extension".into()))?;
            let theta = WittElement {
                ring: target.clone(),
                coeffs: target
                    .data()
                    .hensel_root(source.modulus(), root)
                    .ok_or_else(|| Error::Inconsistency("Hensel lift of embedding failed".into()))?,
            };
            for i in 1..m {
                let next = &images[i - 1] * &theta;
                images.push(next);
            }
        }
        Ok(Embedding { source: source.clone(), target: target.clone(), images })
    }

    pub fn source(&self) -> &RingSpec {
        &self.source
    }

    pub fn target(&self) -> &RingSpec {
        &self.target
    }

    pub fn apply(&self, x: &WittElement) -> WittElement {
        debug_assert!(x.ring().same_as(&self.source));
        let mut acc = WittElement::zero(&self.target);
        for (c, img) in x.coords().iter().zip(&self.images) {
            if *c != 0 {
                acc = &acc + &img.mul_int(*c as i64);
            }
        }
        acc
    }
}

/// Least (by coordinate code) root in the residue field of `target` of a
/// polynomial over F_p, searched over the whole residue field.
fn residue_root(poly: &[u64], target: &RingSpec) -> Option<Vec<u64>> {
    let gf = crate::gf::Gf::get(target.p() as u32, target.residue_degree() as u32);
    let mut best: Option<u32> = None;
    for idx in 0..gf.size() {
        let x = gf.from_index(idx);
        let mut acc = gf.zero();
        for &c in poly.iter().rev() {
            acc = gf.add(gf.mul(acc, x), gf.from_int(c as i64));
        }
        if gf.is_zero(acc) {
            best = Some(idx);
            break;
        }
    }
    best.map(|idx| gf.coords_of_index(idx).into_iter().map(u64::from).collect())
}
