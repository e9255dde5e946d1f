//! Small finite fields F_{p^n} in Zech-logarithm representation.
//!
//! The residue basis is the same least irreducible modulus used by
//! [`RingSpec`](crate::RingSpec), so the additive index c_0 + c_1 p + ..
//! of an element lines up with the coordinates of its Teichmüller lift.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::padic::fp_poly;

/// A field element stored as its discrete logarithm; `ZERO_LOG` marks 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u32);

const ZERO_LOG: u32 = u32::MAX;

pub struct Gf {
    p: u32,
    n: u32,
    size: u32,
    /// exp[k] = additive index of g^k, k < size - 1
    exp: Vec<u32>,
    /// log[index], ZERO_LOG at index 0
    log: Vec<u32>,
    /// zech[k] = log(1 + g^k)
    zech: Vec<u32>,
}

static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Gf>>>> = OnceLock::new();

impl Gf {
    /// Shared instance of F_{p^n}. Panics if p^n does not fit in u32.
    pub fn get(p: u32, n: u32) -> Arc<Gf> {
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&(p, n)) {
            return f.clone();
        }
        let field = Arc::new(Gf::build(p, n));
        cache.lock().unwrap().entry((p, n)).or_insert(field).clone()
    }

    fn build(p: u32, n: u32) -> Gf {
        let size = (p as u64).checked_pow(n).filter(|&s| s < u32::MAX as u64).expect("field too large") as u32;
        let modulus = fp_poly::least_irreducible(p as u64, n as usize);
        let order = size as u64 - 1;
        let to_index = |poly: &[u64]| -> u32 {
            poly.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c) as u32
        };
        let from_index = |mut idx: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(n as usize);
            for _ in 0..n {
                v.push(idx % p as u64);
                idx /= p as u64;
            }
            fp_poly::trim(v)
        };
        let factors = fp_poly::prime_factors(order);
        let generator = (1..size as u64)
            .map(from_index)
            .find(|g| {
                order == 1
                    || factors
                        .iter()
                        .all(|&r| fp_poly::powmod(g, (order / r) as u128, &modulus, p as u64) != vec![1])
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![ZERO_LOG; size as usize];
        let mut cur: Vec<u64> = vec![1];
        for k in 0..order {
            let idx = to_index(&cur);
            exp.push(idx);
            log[idx as usize] = k as u32;
            cur = fp_poly::mulmod(&cur, &generator, &modulus, p as u64);
        }
        let zech = exp
            .iter()
            .map(|&idx| {
                let c0 = idx % p;
                let shifted = idx - c0 + (c0 + 1) % p;
                log[shifted as usize]
            })
            .collect();
        Gf { p, n, size, exp, log, zech }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.n
    }
    pub fn size(&self) -> u32 {
        self.size
    }

    #[inline]
    fn order(&self) -> u32 {
        self.size - 1
    }

    pub fn zero(&self) -> Fe {
        Fe(ZERO_LOG)
    }
    pub fn one(&self) -> Fe {
        Fe(0)
    }
    #[inline]
    pub fn is_zero(&self, a: Fe) -> bool {
        a.0 == ZERO_LOG
    }

    pub fn from_index(&self, idx: u32) -> Fe {
        Fe(self.log[idx as usize])
    }

    pub fn index(&self, a: Fe) -> u32 {
        if self.is_zero(a) {
            0
        } else {
            self.exp[a.0 as usize]
        }
    }

    pub fn coords_of_index(&self, mut idx: u32) -> Vec<u32> {
        (0..self.n)
            .map(|_| {
                let c = idx % self.p;
                idx /= self.p;
                c
            })
            .collect()
    }

    pub fn coords(&self, a: Fe) -> Vec<u32> {
        self.coords_of_index(self.index(a))
    }

    pub fn from_int(&self, c: i64) -> Fe {
        self.from_index(c.rem_euclid(self.p as i64) as u32)
    }

    /// Iterate over all elements in additive-index order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.size).map(|i| self.from_index(i))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        let s = a.0 as u64 + b.0 as u64;
        Fe((s % self.order() as u64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.is_zero(a) {
            return b;
        }
        if self.is_zero(b) {
            return a;
        }
        let ord = self.order();
        let k = if b.0 >= a.0 { b.0 - a.0 } else { b.0 + ord - a.0 };
        let z = self.zech[k as usize];
        if z == ZERO_LOG {
            self.zero()
        } else {
            Fe(((a.0 as u64 + z as u64) % ord as u64) as u32)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.is_zero(a) || self.p == 2 {
            return a;
        }
        let ord = self.order();
        Fe(((a.0 as u64 + (ord / 2) as u64) % ord as u64) as u32)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if self.is_zero(a) {
            None
        } else {
            Some(Fe((self.order() - a.0) % self.order()))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if self.is_zero(a) {
            return if e == 0 { self.one() } else { a };
        }
        let ord = self.order() as u128;
        Fe(((a.0 as u128 * e as u128) % ord) as u32)
    }

    /// Quadratic character: 0, 1 or -1 (odd characteristic).
    pub fn chi(&self, a: Fe) -> i32 {
        if self.is_zero(a) {
            0
        } else if self.p == 2 || a.0 % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return Some(a);
        }
        if self.p == 2 {
            // the order is odd, so halving is multiplication by its inverse mod ord
            let ord = self.order() as u64;
            let half = (ord + 1) / 2;
            return Some(Fe(((a.0 as u64 * half) % ord) as u32));
        }
        (a.0 % 2 == 0).then(|| Fe(a.0 / 2))
    }

    /// x -> x^(p^k).
    pub fn frobenius(&self, a: Fe, k: u32) -> Fe {
        self.pow(a, (self.p as u64).pow(k % self.n))
    }

    /// Images of the elements of F_{p^k} (by additive index) under some
    /// embedding into this field. `None` unless k divides the degree.
    pub fn subfield_embedding(&self, k: u32) -> Option<Vec<Fe>> {
        if k == 0 || self.n % k != 0 {
            return None;
        }
        let small = (self.p as u64).pow(k) as u32;
        if k == 1 {
            return Some((0..small).map(|i| self.from_int(i as i64)).collect());
        }
        let modulus = fp_poly::least_irreducible(self.p as u64, k as usize);
        let step = self.order() / (small - 1);
        let theta = (0..small - 1)
            .map(|j| Fe(j * step))
            .find(|&c| {
                let v = modulus
                    .iter()
                    .rev()
                    .fold(self.zero(), |acc, &m| self.add(self.mul(acc, c), self.from_int(m as i64)));
                self.is_zero(v)
            })?;
        let powers: Vec<Fe> = (0..k).map(|i| self.pow(theta, i as u64)).collect();
        Some(
            (0..small)
                .map(|mut idx| {
                    let mut acc = self.zero();
                    for &pw in &powers {
                        acc = self.add(acc, self.mul(pw, self.from_int((idx % self.p) as i64)));
                        idx /= self.p;
                    }
                    acc
                })
                .collect(),
        )
    }

    /// Least k >= 1 with a^(base^k) = a, where base = p^f and f | n.
    pub fn orbit_length(&self, a: Fe, f: u32) -> u32 {
        let mut k = 1;
        let mut x = self.frobenius(a, f);
        while x != a {
            x = self.frobenius(x, f);
            k += 1;
        }
        k
    }
}

impl std::fmt::Debug for Gf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{}", self.p, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coordinate arithmetic straight from the modulus.
    fn naive_mul(gf: &Gf, a: u32, b: u32) -> u32 {
        let p = gf.p as u64;
        let m = fp_poly::least_irreducible(p, gf.n as usize);
        let to = |i: u32| fp_poly::trim(gf.coords_of_index(i).into_iter().map(u64::from).collect());
        let prod = fp_poly::mulmod(&to(a), &to(b), &m, p);
        prod.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
    }

    #[test]
    fn arithmetic_matches_coordinates() {
        for (p, n) in [(2u32, 3u32), (3, 2), (5, 2), (7, 1), (3, 3)] {
            let gf = Gf::get(p, n);
            for a in 0..gf.size() {
                for b in 0..gf.size() {
                    let (x, y) = (gf.from_index(a), gf.from_index(b));
                    assert_eq!(gf.index(gf.mul(x, y)), naive_mul(&gf, a, b));
                    let ca = gf.coords_of_index(a);
                    let cb = gf.coords_of_index(b);
                    let sum: Vec<u32> = ca.iter().zip(&cb).map(|(u, v)| (u + v) % p).collect();
                    assert_eq!(gf.coords(gf.add(x, y)), sum);
                    assert!(gf.is_zero(gf.add(x, gf.neg(x))));
                }
            }
        }
    }

    #[test]
    fn squares_and_frobenius() {
        let gf = Gf::get(7, 2);
        let squares = gf.elements().filter(|&x| !gf.is_zero(x) && gf.chi(x) == 1).count();
        assert_eq!(squares, 24);
        for x in gf.elements() {
            let y = gf.mul(x, x);
            let r = gf.sqrt(y).unwrap();
            assert_eq!(gf.mul(r, r), y);
            assert_eq!(gf.frobenius(x, 2), x);
        }
        // F_7 inside F_49 is the set of length-1 orbits
        let fixed = gf.elements().filter(|&x| gf.orbit_length(x, 1) == 1).count();
        assert_eq!(fixed, 7);
    }

    #[test]
    fn subfield_embedding_is_a_homomorphism() {
        for (p, k, n) in [(2u32, 2u32, 4u32), (3, 2, 4), (5, 1, 3), (7, 2, 2)] {
            let small = Gf::get(p, k);
            let big = Gf::get(p, n);
            let e = big.subfield_embedding(k).unwrap();
            for a in 0..small.size() {
                for b in 0..small.size() {
                    let (x, y) = (small.from_index(a), small.from_index(b));
                    assert_eq!(e[small.index(small.mul(x, y)) as usize], big.mul(e[a as usize], e[b as usize]));
                    assert_eq!(e[small.index(small.add(x, y)) as usize], big.add(e[a as usize], e[b as usize]));
                }
            }
        }
        assert!(Gf::get(3, 3).subfield_embedding(2).is_none());
    }
}
