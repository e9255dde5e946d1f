//! Truncated power series W(F_q)[[t]] / (p^M, t^N) with a Frobenius lift φ.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{Embedding, Frobenius, Ring, RingSpec, Val, WittElement};

#[derive(Clone)]
pub struct TruncSeriesRing(Arc<SeriesRingData>);

struct SeriesRingData {
    base: RingSpec,
    n: usize,
    frob_t: Vec<WittElement>,
    /// φ(t)^k mod t^N for k < N
    frob_powers: Vec<Vec<WittElement>>,
    /// dφ(t)/dt, exact below t^(N-1)
    frob_deriv: Vec<WittElement>,
}

impl TruncSeriesRing {
    /// φ(t) = t^q.
    pub fn new(base: &RingSpec, n: usize) -> Result<Self> {
        let q = base.q() as usize;
        let mut frob = vec![0i64; n.max(1)];
        if q < n {
            frob[q] = 1;
        }
        Self::with_frobenius(base, n, &frob.iter().map(|&c| vec![c]).collect::<Vec<_>>())
    }

    /// φ given by the coefficients of φ(t) (coordinate vectors over the base),
    /// which must vanish at 0 and reduce to t^q mod p.
    pub fn with_frobenius(base: &RingSpec, n: usize, frob_t: &[Vec<i64>]) -> Result<Self> {
        if n < 1 {
            return Err(Error::config("N", "truncation order must be at least 1"));
        }
        if frob_t.len() > n {
            return Err(Error::config("frob_t", format!("{} coefficients exceed t-adic order {n}", frob_t.len())));
        }
        let mut coeffs: Vec<WittElement> =
            frob_t.iter().map(|c| WittElement::from_coords(base, c)).collect::<Result<_>>()?;
        coeffs.resize(n, WittElement::zero(base));
        if !coeffs[0].is_zero() {
            return Err(Error::config("frob_t", "φ(t) must have zero constant term"));
        }
        let q = base.q() as usize;
        for (k, c) in coeffs.iter().enumerate() {
            let want = u64::from(k == q);
            let res = c.residue();
            if res[0] != want || res[1..].iter().any(|&x| x != 0) {
                return Err(Error::config("frob_t", format!("φ(t) is not congruent to t^{q} mod p (coefficient of t^{k})")));
            }
        }
        let mut powers = vec![unit_vec(base, n)];
        for k in 1..n {
            let next = trunc_mul(&powers[k - 1], &coeffs, n);
            powers.push(next);
        }
        let mut deriv: Vec<WittElement> =
            (1..n).map(|k| coeffs[k].mul_int(k as i64)).collect();
        deriv.push(WittElement::zero(base));
        Ok(TruncSeriesRing(Arc::new(SeriesRingData {
            base: base.clone(),
            n,
            frob_t: coeffs,
            frob_powers: powers,
            frob_deriv: deriv,
        })))
    }

    pub fn base(&self) -> &RingSpec {
        &self.0.base
    }
    pub fn order(&self) -> usize {
        self.0.n
    }
    pub fn frob_t(&self) -> Series {
        Series { ring: self.clone(), c: self.0.frob_t.clone() }
    }
    pub fn frob_t_is_default(&self) -> bool {
        let q = self.base().q() as usize;
        self.0.frob_t.iter().enumerate().all(|(k, c)| if k == q { c.to_integer() == Some(1) } else { c.is_zero() })
    }

    /// The same φ over a base of lower precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        let base = self.base().with_precision(precision)?;
        let frob: Vec<Vec<i64>> =
            self.0.frob_t.iter().map(|c| c.with_ring(&base).coords().iter().map(|&x| x as i64).collect()).collect();
        Self::with_frobenius(&base, self.order(), &frob)
    }

    pub fn same_as(&self, other: &TruncSeriesRing) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.order() == other.order() && self.base().same_as(other.base()) && self.0.frob_t == other.0.frob_t)
    }

    pub fn zero(&self) -> Series {
        Series { ring: self.clone(), c: vec![WittElement::zero(self.base()); self.order()] }
    }

    pub fn one(&self) -> Series {
        self.constant(&WittElement::one(self.base()))
    }

    pub fn constant(&self, a: &WittElement) -> Series {
        let mut s = self.zero();
        s.c[0] = a.clone();
        s
    }

    pub fn from_int(&self, v: i64) -> Series {
        self.constant(&WittElement::from_int(self.base(), v))
    }

    pub fn t(&self) -> Series {
        let mut s = self.zero();
        if self.order() > 1 {
            s.c[1] = WittElement::one(self.base());
        }
        s
    }

    /// Series from base-ring coefficients, low degree first; terms past t^N are dropped.
    pub fn from_coeffs(&self, coeffs: &[WittElement]) -> Series {
        let mut s = self.zero();
        for (slot, c) in s.c.iter_mut().zip(coeffs) {
            *slot = c.clone();
        }
        s
    }

    pub fn from_ints(&self, coeffs: &[i64]) -> Series {
        let c: Vec<WittElement> = coeffs.iter().map(|&v| WittElement::from_int(self.base(), v)).collect();
        self.from_coeffs(&c)
    }
}

impl fmt::Debug for TruncSeriesRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[[t]]/t^{}", self.base(), self.order())
    }
}

fn unit_vec(base: &RingSpec, n: usize) -> Vec<WittElement> {
    let mut v = vec![WittElement::zero(base); n];
    v[0] = WittElement::one(base);
    v
}

fn trunc_mul(a: &[WittElement], b: &[WittElement], n: usize) -> Vec<WittElement> {
    let base = a[0].ring().clone();
    let mut out = vec![WittElement::zero(&base); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

#[derive(Clone, PartialEq)]
pub struct Series {
    ring: TruncSeriesRing,
    c: Vec<WittElement>,
}

impl PartialEq for TruncSeriesRing {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Series {
    pub fn ring(&self) -> &TruncSeriesRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &[WittElement] {
        &self.c
    }

    pub fn constant_term(&self) -> &WittElement {
        &self.c[0]
    }

    /// Minimum coefficient valuation over the stored window.
    pub fn gauss_valuation(&self) -> Val {
        let m = self.ring.base().precision();
        self.c.iter().filter_map(|c| c.valuation().finite()).min().map_or(Val::AtLeast(m), Val::Finite)
    }

    /// Least k with a nonzero coefficient at t^k.
    pub fn t_order(&self) -> Option<usize> {
        self.c.iter().position(|c| !c.is_zero())
    }

    /// Formal derivative; the t^(N-1) coefficient is unknown and set to 0.
    pub fn derivative(&self) -> Series {
        let base = self.ring.base();
        let n = self.c.len();
        let mut out = vec![WittElement::zero(base); n];
        for k in 1..n {
            out[k - 1] = self.c[k].mul_int(k as i64);
        }
        Series { ring: self.ring.clone(), c: out }
    }

    /// Apply φ: Σ a_k t^k -> Σ σ(a_k) φ(t)^k.
    pub fn frobenius(&self) -> Series {
        let data = &self.ring.0;
        let n = data.n;
        let mut out = vec![WittElement::zero(&data.base); n];
        for (k, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sa = a.frobenius();
            for (o, pw) in out.iter_mut().zip(&data.frob_powers[k]).skip(k) {
                if !pw.is_zero() {
                    *o = &*o + &(&sa * pw);
                }
            }
        }
        Series { ring: self.ring.clone(), c: out }
    }

    pub fn frob_deriv(ring: &TruncSeriesRing) -> Series {
        Series { ring: ring.clone(), c: ring.0.frob_deriv.clone() }
    }

    /// Evaluate at a point of an extension of the base ring.
    pub fn eval(&self, point: &WittElement, emb: &Embedding) -> WittElement {
        let mut acc = WittElement::zero(emb.target());
        for c in self.c.iter().rev() {
            acc = &(&acc * point) + &emb.apply(c);
        }
        acc
    }

    pub fn scale(&self, a: &WittElement) -> Series {
        Series { ring: self.ring.clone(), c: self.c.iter().map(|x| x * a).collect() }
    }

    /// Exact division by p^k into the same series ring at precision M - k.
    pub fn div_p_power(&self, k: u32, target: &TruncSeriesRing) -> Option<Series> {
        let c = self.c.iter().map(|x| x.div_p_power(k, target.base())).collect::<Option<Vec<_>>>()?;
        Some(Series { ring: target.clone(), c })
    }

    /// Reinterpret in `target` (same φ and order, other precision).
    pub fn with_ring(&self, target: &TruncSeriesRing) -> Series {
        Series { ring: target.clone(), c: self.c.iter().map(|x| x.with_ring(target.base())).collect() }
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c:?}"),
                1 => format!("{c:?}t"),
                _ => format!("{c:?}t^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Ring for Series {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn from_int_like(&self, v: i64) -> Self {
        self.ring.from_int(v)
    }
    fn add(&self, o: &Self) -> Self {
        Series { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        Series { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        Series { ring: self.ring.clone(), c: trunc_mul(&self.c, &o.c, self.c.len()) }
    }
    fn neg(&self) -> Self {
        Series { ring: self.ring.clone(), c: self.c.iter().map(|a| -a).collect() }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(WittElement::is_zero)
    }
    fn is_unit(&self) -> bool {
        self.c[0].is_unit()
    }
    fn unit_inverse(&self) -> Option<Self> {
        let inv0 = self.c[0].inverse()?;
        let n = self.c.len();
        let mut b: Vec<WittElement> = Vec::with_capacity(n);
        b.push(inv0.clone());
        for k in 1..n {
            let mut s = WittElement::zero(self.ring.base());
            for j in 1..=k {
                s = &s + &(&self.c[j] * &b[k - j]);
            }
            b.push(-&(&inv0 * &s));
        }
        Some(Series { ring: self.ring.clone(), c: b })
    }
}

impl Frobenius for Series {
    fn frob(&self) -> Self {
        self.frobenius()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32, n: usize) -> TruncSeriesRing {
        TruncSeriesRing::new(&RingSpec::new(p, 1, 1, m).unwrap(), n).unwrap()
    }

    #[test]
    fn frobenius_is_substitution() {
        let r = ring(2, 5, 9);
        let s = r.from_ints(&[1, 1]);
        // (1 + t) -> 1 + t^2
        assert_eq!(s.frobenius(), r.from_ints(&[1, 0, 1]));
        let a = r.from_ints(&[3, 1, 4, 1]);
        let b = r.from_ints(&[5, 9, 2]);
        assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
    }

    #[test]
    fn inverse_and_derivative() {
        let r = ring(5, 4, 6);
        let a = r.from_ints(&[2, 3, 0, 7, 1]);
        assert_eq!(a.mul(&a.unit_inverse().unwrap()), r.one());
        assert!(r.t().unit_inverse().is_none());
        assert_eq!(r.from_ints(&[0, 0, 1]).derivative(), r.from_ints(&[0, 2]));
    }

    #[test]
    fn nonstandard_lift_is_checked() {
        let base = RingSpec::new(3, 1, 1, 4).unwrap();
        assert!(TruncSeriesRing::with_frobenius(&base, 6, &[vec![0], vec![3], vec![0], vec![1]]).is_ok());
        assert!(TruncSeriesRing::with_frobenius(&base, 6, &[vec![0], vec![1]]).is_err());
        assert!(TruncSeriesRing::with_frobenius(&base, 6, &[vec![3], vec![0], vec![0], vec![1]]).is_err());
    }

    #[test]
    fn chain_rule_for_frobenius() {
        let base = RingSpec::new(3, 1, 1, 4).unwrap();
        let r = TruncSeriesRing::with_frobenius(&base, 8, &[vec![0], vec![3], vec![0], vec![1]]).unwrap();
        let a = r.from_ints(&[1, 2, 0, 5, 1]);
        // d/dt φ(a) = φ'(t) φ(a'), compared below t^(N-1)
        let lhs = a.frobenius().derivative();
        let rhs = Series::frob_deriv(&r).mul(&a.derivative().frobenius());
        assert_eq!(&lhs.coeffs()[..6], &rhs.coeffs()[..6]);
    }
}
