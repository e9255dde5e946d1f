//! Curves over F_q by brute-force enumeration: point counts, zeta
//! numerators, closed points and [n]-preimage counts on elliptic curves.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{check_budget, field_size};
use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::padic::fp_poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    ProjectiveLine,
    #[serde(alias = "elliptic")]
    EllipticWeierstrass,
    Hyperelliptic,
}

/// A coefficient in F_q: an integer (read mod p) or coordinates over F_p
/// in the basis of the least irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Int(i64),
    Coords(Vec<i64>),
}

impl Coef {
    fn index(&self, p: u64, f: u32) -> Result<u32> {
        let coords = match self {
            Coef::Int(c) => vec![*c],
            Coef::Coords(v) => v.clone(),
        };
        if coords.len() > f as usize {
            return Err(Error::config("coefficients", format!("{coords:?} has more than {f} coordinates")));
        }
        Ok(coords.iter().rev().fold(0u64, |acc, &c| acc * p + c.rem_euclid(p as i64) as u64) as u32)
    }
}

impl From<i64> for Coef {
    fn from(c: i64) -> Self {
        Coef::Int(c)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveRepr {
    pub kind: CurveKind,
    pub q: u64,
    #[serde(default, alias = "a", alias = "f")]
    pub coefficients: Vec<Coef>,
}

/// A smooth projective curve over F_q.
///
/// Elliptic curves are long Weierstrass `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
/// with coefficients `[a1, a2, a3, a4, a6]`; hyperelliptic curves are `y^2 = f(x)`
/// with `f` listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    kind: CurveKind,
    p: u64,
    f: u32,
    /// additive indices in F_q
    coeffs: Vec<u32>,
    genus: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvePoint {
    Infinity,
    /// Additive indices of x and y in F_{q^m}.
    Affine { x: u32, y: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPoint {
    pub id: String,
    pub degree: u32,
    /// Representative coordinates as additive indices in F_{q^degree};
    /// absent at infinity.
    pub x: Option<u32>,
    pub y: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaData {
    pub q: u64,
    pub genus: u32,
    pub p_rank: u32,
    /// P(t) from the constant term up.
    pub numerator: Vec<i64>,
    /// N_1, .., N_{2g}.
    pub counts: Vec<u64>,
}

/// The curve base-changed to F_{q^m}, in the shape y^2 = h(x) when odd.
struct FieldView {
    gf: Arc<Gf>,
    coeffs: Vec<Fe>,
    /// h from the constant term up
    rhs: Vec<Fe>,
}

fn horner(gf: &Gf, poly: &[Fe], x: Fe) -> Fe {
    poly.iter().rev().fold(gf.zero(), |acc, &c| gf.add(gf.mul(acc, x), c))
}

fn trim(gf: &Gf, mut a: Vec<Fe>) -> Vec<Fe> {
    while a.last().is_some_and(|&c| gf.is_zero(c)) {
        a.pop();
    }
    a
}

fn poly_rem(gf: &Gf, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut r = trim(gf, a.to_vec());
    let lead = gf.inv(*b.last().unwrap()).unwrap();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = gf.mul(*r.last().unwrap(), lead);
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = gf.sub(r[shift + i], gf.mul(c, bi));
        }
        r = trim(gf, r);
    }
    r
}

fn is_squarefree(gf: &Gf, f: &[Fe]) -> bool {
    let df: Vec<Fe> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| gf.mul(c, gf.from_int(i as i64)))
        .collect();
    let (mut a, mut b) = (trim(gf, f.to_vec()), trim(gf, df));
    if b.is_empty() {
        return false;
    }
    while !b.is_empty() {
        let r = poly_rem(gf, &a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn lcm(a: u32, b: u32) -> u32 {
    a / num_integer::gcd(a, b) * b
}

impl CurveModel {
    pub fn new(kind: CurveKind, q: u64, coefficients: &[Coef]) -> Result<Self> {
        let (p, f) = fp_poly::prime_power(q).ok_or_else(|| Error::config("q", format!("{q} is not a prime power")))?;
        let coeffs = coefficients.iter().map(|c| c.index(p, f)).collect::<Result<Vec<_>>>()?;
        let gf = Gf::get(p as u32, f);
        let fe: Vec<Fe> = coeffs.iter().map(|&i| gf.from_index(i)).collect();
        let genus = match kind {
            CurveKind::ProjectiveLine => {
                if !coeffs.is_empty() {
                    return Err(Error::config("coefficients", "the projective line takes none"));
                }
                0
            }
            CurveKind::EllipticWeierstrass => {
                if p == 2 {
                    return Err(Error::config("q", "elliptic curves need odd characteristic"));
                }
                if coeffs.len() != 5 {
                    return Err(Error::config("coefficients", "expected [a1, a2, a3, a4, a6]"));
                }
                if gf.is_zero(discriminant(&gf, &fe)) {
                    return Err(Error::config("coefficients", "singular Weierstrass equation"));
                }
                1
            }
            CurveKind::Hyperelliptic => {
                if p == 2 {
                    return Err(Error::config("q", "hyperelliptic curves need odd characteristic"));
                }
                let poly = trim(&gf, fe.clone());
                if poly.len() < 4 || poly.len() > 11 {
                    return Err(Error::config("coefficients", "f must have degree 3..=10 (genus 1..=4)"));
                }
                if !is_squarefree(&gf, &poly) {
                    return Err(Error::config("coefficients", "f is not squarefree"));
                }
                (poly.len() as u32 - 2) / 2
            }
        };
        let mut coeffs = coeffs;
        if kind == CurveKind::Hyperelliptic {
            while coeffs.last() == Some(&0) {
                coeffs.pop();
            }
        }
        Ok(CurveModel { kind, p, f, coeffs, genus })
    }

    pub fn projective_line(q: u64) -> Result<Self> {
        Self::new(CurveKind::ProjectiveLine, q, &[])
    }

    pub fn elliptic(q: u64, a: [i64; 5]) -> Result<Self> {
        Self::new(CurveKind::EllipticWeierstrass, q, &a.map(Coef::Int))
    }

    pub fn hyperelliptic(q: u64, f: &[i64]) -> Result<Self> {
        let c: Vec<Coef> = f.iter().map(|&x| Coef::Int(x)).collect();
        Self::new(CurveKind::Hyperelliptic, q, &c)
    }

    pub fn from_repr(r: &CurveRepr) -> Result<Self> {
        Self::new(r.kind, r.q, &r.coefficients)
    }

    pub fn to_repr(&self) -> CurveRepr {
        let gf = Gf::get(self.p as u32, self.f);
        let coefficients = self
            .coeffs
            .iter()
            .map(|&i| {
                let c: Vec<i64> = gf.coords_of_index(i).into_iter().map(i64::from).collect();
                if self.f == 1 { Coef::Int(c[0]) } else { Coef::Coords(c) }
            })
            .collect();
        CurveRepr { kind: self.kind, q: self.q(), coefficients }
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    /// q = p^f.
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }
    pub fn genus(&self) -> u32 {
        self.genus
    }
    pub fn coefficients(&self) -> &[u32] {
        &self.coeffs
    }

    fn view(&self, m: u32) -> Result<FieldView> {
        check_budget(field_size(self.q(), m))?;
        let gf = Gf::get(self.p as u32, self.f * m);
        let emb = gf.subfield_embedding(self.f).expect("F_q sits inside F_{q^m}");
        let coeffs: Vec<Fe> = self.coeffs.iter().map(|&i| emb[i as usize]).collect();
        let rhs = match self.kind {
            CurveKind::ProjectiveLine => vec![],
            CurveKind::Hyperelliptic => coeffs.clone(),
            CurveKind::EllipticWeierstrass => completed_square(&gf, [coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]]),
        };
        Ok(FieldView { gf, coeffs, rhs })
    }

    /// Rational points at infinity over F_{q^m}.
    fn points_at_infinity(&self, v: &FieldView) -> u64 {
        match self.kind {
            CurveKind::ProjectiveLine | CurveKind::EllipticWeierstrass => 1,
            CurveKind::Hyperelliptic if v.rhs.len() % 2 == 0 => 1,
            CurveKind::Hyperelliptic => (1 + v.gf.chi(*v.rhs.last().unwrap())) as u64,
        }
    }

    /// Projective point count over F_{q^m}.
    pub fn count_points(&self, m: u32) -> Result<u64> {
        if m == 0 {
            return Err(Error::config("m", "must be at least 1"));
        }
        if self.kind == CurveKind::ProjectiveLine {
            let n = field_size(self.q(), m);
            return u64::try_from(n + 1).map_err(|_| Error::OutOfRange(format!("q^{m} + 1 overflows")));
        }
        let v = self.view(m)?;
        let gf = &v.gf;
        let chi_sum: i64 = (0..gf.size())
            .into_par_iter()
            .map(|i| gf.chi(horner(gf, &v.rhs, gf.from_index(i))) as i64)
            .sum();
        let n = gf.size() as i64 + chi_sum + self.points_at_infinity(&v) as i64;
        let hw = hasse_weil_ok(self.q(), self.genus, m, n as u64);
        if !hw {
            return Err(Error::Inconsistency(format!("N_{m} = {n} violates the Hasse-Weil bound")));
        }
        Ok(n as u64)
    }

    /// N_1, .., N_k.
    pub fn point_counts(&self, k: u32) -> Result<Vec<u64>> {
        (1..=k).map(|m| self.count_points(m)).collect()
    }

    pub fn zeta(&self) -> Result<ZetaData> {
        let g = self.genus;
        let q = self.q();
        let counts = self.point_counts(2 * g)?;
        let sums: Vec<i128> = counts
            .iter()
            .enumerate()
            .map(|(i, &n)| (q as i128).pow(i as u32 + 1) + 1 - n as i128)
            .collect();
        let numerator = numerator_from_power_sums(&sums)?;
        for k in 0..=g as usize {
            let lhs = numerator[2 * g as usize - k];
            let rhs = (q as i128).pow(g - k as u32) * numerator[k] as i128;
            if lhs as i128 != rhs {
                return Err(Error::Inconsistency(format!(
                    "functional equation fails at t^{}: {lhs} != {rhs}",
                    2 * g as usize - k
                )));
            }
        }
        let p_rank = numerator.iter().rposition(|&c| c.rem_euclid(self.p as i64) != 0).unwrap_or(0) as u32;
        if p_rank > g {
            return Err(Error::Inconsistency(format!("p-rank {p_rank} exceeds genus {g}")));
        }
        Ok(ZetaData { q, genus: g, p_rank, numerator, counts })
    }

    /// Frobenius orbits of geometric points of degree d <= `max_degree`.
    pub fn closed_points(&self, max_degree: u32) -> Result<Vec<ClosedPoint>> {
        check_budget(field_size(self.q(), max_degree))?;
        let mut out = Vec::new();
        for d in 1..=max_degree {
            let v = self.view(d)?;
            out.extend(self.closed_points_of_degree(&v, d));
        }
        Ok(out)
    }

    fn closed_points_of_degree(&self, v: &FieldView, d: u32) -> Vec<ClosedPoint> {
        let gf = &v.gf;
        let f = self.f;
        let inf = |id: &str, degree| ClosedPoint { id: id.into(), degree, x: None, y: None };
        let mut out = Vec::new();
        match self.kind {
            CurveKind::ProjectiveLine | CurveKind::EllipticWeierstrass if d == 1 => out.push(inf("1:inf", 1)),
            CurveKind::Hyperelliptic if v.rhs.len() % 2 == 0 && d == 1 => out.push(inf("1:inf", 1)),
            CurveKind::Hyperelliptic if v.rhs.len() % 2 == 1 => {
                let lc = Gf::get(self.p as u32, f).from_index(*self.coeffs.last().unwrap());
                let split = Gf::get(self.p as u32, f).chi(lc) == 1;
                match (split, d) {
                    (true, 1) => out.extend([inf("1:inf:+", 1), inf("1:inf:-", 1)]),
                    (false, 2) => out.push(inf("2:inf", 2)),
                    _ => {}
                }
            }
            _ => {}
        }
        let frob = |a: Fe| gf.frobenius(a, f);
        let mut affine: Vec<ClosedPoint> = (0..gf.size())
            .into_par_iter()
            .flat_map_iter(|i| {
                let x = gf.from_index(i);
                let mut pts = Vec::new();
                if self.kind == CurveKind::ProjectiveLine {
                    if gf.orbit_length(x, f) == d && orbit_min(x, frob, gf) == i {
                        pts.push(ClosedPoint { id: format!("{d}:{i}"), degree: d, x: Some(i), y: None });
                    }
                    return pts;
                }
                let Some(s) = gf.sqrt(horner(gf, &v.rhs, x)) else { return pts };
                let roots = if gf.is_zero(s) { vec![s] } else { vec![s, gf.neg(s)] };
                for r in roots {
                    let y = self.unshift_y(v, x, r);
                    let len = lcm(gf.orbit_length(x, f), gf.orbit_length(y, f));
                    if len != d {
                        continue;
                    }
                    let key = (gf.index(x), gf.index(y));
                    if orbit_min_pair(d, (x, y), frob, gf) == key {
                        pts.push(ClosedPoint { id: format!("{d}:{}:{}", key.0, key.1), degree: d, x: Some(key.0), y: Some(key.1) });
                    }
                }
                pts
            })
            .collect();
        affine.sort_by_key(|c| (c.x, c.y));
        out.extend(affine);
        out
    }

    /// y in the original model from y' on y'^2 = h(x).
    fn unshift_y(&self, v: &FieldView, x: Fe, y: Fe) -> Fe {
        if self.kind != CurveKind::EllipticWeierstrass {
            return y;
        }
        let gf = &v.gf;
        let half = gf.inv(gf.from_int(2)).unwrap();
        gf.sub(y, gf.mul(half, gf.add(gf.mul(v.coeffs[0], x), v.coeffs[2])))
    }

    /// Checks Σ_{d|m} d·#(orbits of degree d) = N_m for m <= D.
    pub fn partition_check(&self, max_degree: u32) -> Result<bool> {
        let pts = self.closed_points(max_degree)?;
        for m in 1..=max_degree {
            let total: u64 = pts.iter().filter(|c| m % c.degree == 0).map(|c| c.degree as u64).sum();
            if total != self.count_points(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The group E(F_{q^m}) of an elliptic curve.
    pub fn group(&self, m: u32) -> Result<EllipticGroup> {
        if self.kind != CurveKind::EllipticWeierstrass {
            return Err(Error::config("kind", "group law needs an elliptic curve"));
        }
        if m == 0 {
            return Err(Error::config("m", "must be at least 1"));
        }
        let v = self.view(m)?;
        let a = [v.coeffs[0], v.coeffs[1], v.coeffs[2], v.coeffs[3], v.coeffs[4]];
        Ok(EllipticGroup { gf: v.gf, a })
    }

    /// #{Q in E(F_{q^m}) : nQ = P}.
    pub fn mult_n_preimages(&self, n: u64, target: &CurvePoint, m: u32) -> Result<u64> {
        if n == 0 || n % self.p == 0 {
            return Err(Error::config("n", format!("need gcd(n, {}) = 1 and n >= 1", self.p)));
        }
        let e = self.group(m)?;
        if !e.contains(target) {
            return Err(Error::config("P", "point is not on the curve over F_{q^m}"));
        }
        let pts = e.points();
        Ok(pts.par_iter().filter(|q| e.mul(n, q) == *target).count() as u64)
    }
}

fn orbit_min(x: Fe, frob: impl Fn(Fe) -> Fe, gf: &Gf) -> u32 {
    let mut best = gf.index(x);
    let mut cur = frob(x);
    while cur != x {
        best = best.min(gf.index(cur));
        cur = frob(cur);
    }
    best
}

fn orbit_min_pair(d: u32, pt: (Fe, Fe), frob: impl Fn(Fe) -> Fe, gf: &Gf) -> (u32, u32) {
    let mut best = (gf.index(pt.0), gf.index(pt.1));
    let mut cur = pt;
    for _ in 1..d {
        cur = (frob(cur.0), frob(cur.1));
        best = best.min((gf.index(cur.0), gf.index(cur.1)));
    }
    best
}

pub fn hasse_weil_ok(q: u64, genus: u32, m: u32, n: u64) -> bool {
    let qm = field_size(q, m) as i128;
    let dev = n as i128 - qm - 1;
    dev * dev <= 4 * (genus as i128).pow(2) * qm
}

/// P(t) = Π(1 - α_i t) from the power sums s_k = Σ α_i^k, k = 1..n.
pub fn numerator_from_power_sums(sums: &[i128]) -> Result<Vec<i64>> {
    let mut c: Vec<i128> = vec![1];
    for k in 1..=sums.len() {
        let acc: i128 = (1..=k).map(|j| sums[j - 1] * c[k - j]).sum();
        if acc % k as i128 != 0 {
            return Err(Error::Inconsistency(format!("Newton identity not integral at degree {k}")));
        }
        c.push(-acc / k as i128);
    }
    c.into_iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::OutOfRange("numerator coefficient".into())))
        .collect()
}

/// Power sums s_1..s_n of the inverse roots of P(t), P(0) = 1.
pub fn power_sums_from_numerator(p: &[i64], n: usize) -> Vec<i128> {
    let c = |k: usize| p.get(k).copied().unwrap_or(0) as i128;
    let mut s: Vec<i128> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = -(k as i128) * c(k);
        for j in 1..k {
            acc -= c(j) * s[k - j - 1];
        }
        s.push(acc);
    }
    s
}

impl ZetaData {
    /// N_m recovered from the numerator, for any m.
    pub fn count(&self, m: u32) -> i128 {
        let s = power_sums_from_numerator(&self.numerator, m as usize);
        (self.q as i128).pow(m) + 1 - s[m as usize - 1]
    }

    pub fn numerator_mod_p(&self, p: u64) -> Vec<u64> {
        self.numerator.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect()
    }
}

/// h(x) with (y + (a1 x + a3)/2)^2 = h(x), odd characteristic.
fn completed_square(gf: &Gf, a: [Fe; 5]) -> Vec<Fe> {
    let [a1, a2, a3, a4, a6] = a;
    let quarter = gf.inv(gf.from_int(4)).unwrap();
    let half = gf.inv(gf.from_int(2)).unwrap();
    vec![
        gf.add(a6, gf.mul(quarter, gf.mul(a3, a3))),
        gf.add(a4, gf.mul(half, gf.mul(a1, a3))),
        gf.add(a2, gf.mul(quarter, gf.mul(a1, a1))),
        gf.one(),
    ]
}

/// Projective count of a long Weierstrass curve whose coefficients already
/// live in `gf` (odd characteristic).
pub fn weierstrass_count(gf: &Gf, a: [Fe; 5]) -> u64 {
    let h = completed_square(gf, a);
    let chi_sum: i64 = (0..gf.size()).map(|i| gf.chi(horner(gf, &h, gf.from_index(i))) as i64).sum();
    (gf.size() as i64 + 1 + chi_sum) as u64
}

pub fn discriminant(gf: &Gf, a: &[Fe]) -> Fe {
    let [a1, a2, a3, a4, a6] = [a[0], a[1], a[2], a[3], a[4]];
    let m = |x, y| gf.mul(x, y);
    let c = |k| gf.from_int(k);
    let b2 = gf.add(m(a1, a1), m(c(4), a2));
    let b4 = gf.add(m(c(2), a4), m(a1, a3));
    let b6 = gf.add(m(a3, a3), m(c(4), a6));
    let b8 = [m(m(a1, a1), a6), m(c(4), m(a2, a6)), gf.neg(m(a1, m(a3, a4))), m(a2, m(a3, a3)), gf.neg(m(a4, a4))]
        .into_iter()
        .fold(gf.zero(), |s, t| gf.add(s, t));
    [
        gf.neg(m(m(b2, b2), b8)),
        m(c(-8), m(b4, m(b4, b4))),
        m(c(-27), m(b6, b6)),
        m(c(9), m(b2, m(b4, b6))),
    ]
    .into_iter()
    .fold(gf.zero(), |s, t| gf.add(s, t))
}

/// Chord-and-tangent arithmetic on E(F_{q^m}).
pub struct EllipticGroup {
    gf: Arc<Gf>,
    a: [Fe; 5],
}

impl EllipticGroup {
    pub fn field(&self) -> &Gf {
        &self.gf
    }

    fn lhs_minus_rhs(&self, x: Fe, y: Fe) -> Fe {
        let gf = &self.gf;
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = gf.add(gf.mul(y, y), gf.mul(y, gf.add(gf.mul(a1, x), a3)));
        let rhs = horner(gf, &[a6, a4, a2, gf.one()], x);
        gf.sub(lhs, rhs)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match *p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                x < self.gf.size()
                    && y < self.gf.size()
                    && self.gf.is_zero(self.lhs_minus_rhs(self.gf.from_index(x), self.gf.from_index(y)))
            }
        }
    }

    pub fn points(&self) -> Vec<CurvePoint> {
        let gf = &self.gf;
        let [a1, _, a3, _, _] = self.a;
        let mut pts: Vec<CurvePoint> = (0..gf.size())
            .into_par_iter()
            .flat_map_iter(|i| {
                let x = gf.from_index(i);
                // y^2 + b y - c = 0 with b = a1 x + a3
                let b = gf.add(gf.mul(a1, x), a3);
                let c = gf.neg(self.lhs_minus_rhs(x, gf.zero()));
                let disc = gf.add(gf.mul(b, b), gf.mul(gf.from_int(4), c));
                let half = gf.inv(gf.from_int(2)).unwrap();
                let mut out = Vec::new();
                if let Some(s) = gf.sqrt(disc) {
                    let y1 = gf.mul(half, gf.sub(s, b));
                    let y2 = gf.mul(half, gf.sub(gf.neg(s), b));
                    out.push(CurvePoint::Affine { x: i, y: gf.index(y1) });
                    if y2 != y1 {
                        out.push(CurvePoint::Affine { x: i, y: gf.index(y2) });
                    }
                }
                out
            })
            .collect();
        pts.push(CurvePoint::Infinity);
        pts.sort();
        pts
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match *p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let gf = &self.gf;
                let (xf, yf) = (gf.from_index(x), gf.from_index(y));
                let ny = gf.sub(gf.neg(yf), gf.add(gf.mul(self.a[0], xf), self.a[2]));
                CurvePoint::Affine { x, y: gf.index(ny) }
            }
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) = (*p, *q) else {
            return if *p == CurvePoint::Infinity { *q } else { *p };
        };
        if *q == self.neg(p) {
            return CurvePoint::Infinity;
        }
        let gf = &self.gf;
        let [a1, a2, a3, a4, _] = self.a;
        let (x1, y1, x2, y2) = (gf.from_index(x1), gf.from_index(y1), gf.from_index(x2), gf.from_index(y2));
        let lambda = if x1 != x2 {
            gf.div(gf.sub(y2, y1), gf.sub(x2, x1)).unwrap()
        } else {
            let num = [gf.mul(gf.from_int(3), gf.mul(x1, x1)), gf.mul(gf.from_int(2), gf.mul(a2, x1)), a4, gf.neg(gf.mul(a1, y1))]
                .into_iter()
                .fold(gf.zero(), |s, t| gf.add(s, t));
            let den = gf.add(gf.mul(gf.from_int(2), y1), gf.add(gf.mul(a1, x1), a3));
            gf.div(num, den).unwrap()
        };
        let nu = gf.sub(y1, gf.mul(lambda, x1));
        let x3 = [gf.mul(lambda, lambda), gf.mul(a1, lambda), gf.neg(a2), gf.neg(x1), gf.neg(x2)]
            .into_iter()
            .fold(gf.zero(), |s, t| gf.add(s, t));
        let y3 = gf.sub(gf.neg(gf.mul(gf.add(lambda, a1), x3)), gf.add(nu, a3));
        CurvePoint::Affine { x: gf.index(x3), y: gf.index(y3) }
    }

    pub fn mul(&self, mut n: u64, p: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        let mut base = *p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            n >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_line_counts_and_orbits() {
        let c = CurveModel::projective_line(2).unwrap();
        assert_eq!(c.count_points(3).unwrap(), 9);
        let pts = c.closed_points(2).unwrap();
        assert_eq!(pts.iter().filter(|p| p.degree == 1).count(), 3);
        assert_eq!(pts.iter().filter(|p| p.degree == 2).count(), 1);
        let z = c.zeta().unwrap();
        assert_eq!((z.numerator.clone(), z.p_rank, z.genus), (vec![1], 0, 0));
    }

    #[test]
    fn supersingular_curve_over_f7() {
        let c = CurveModel::elliptic(7, [0, 0, 0, 1, 0]).unwrap();
        assert_eq!(c.count_points(1).unwrap(), 8);
        let z = c.zeta().unwrap();
        assert_eq!(z.numerator, vec![1, 0, 7]);
        assert_eq!(z.p_rank, 0);
    }

    #[test]
    fn singular_and_non_squarefree_models_are_rejected() {
        assert!(CurveModel::elliptic(7, [0, 0, 0, 0, 0]).is_err());
        assert!(CurveModel::hyperelliptic(5, &[0, 0, 1, 1]).is_err());
        assert!(CurveModel::hyperelliptic(4, &[1, 0, 0, 1]).is_err());
    }

    #[test]
    fn even_degree_points_at_infinity() {
        // y^2 = 3 x^4 + 1 over F_5: 3 is a non-square, so no rational points at infinity
        let c = CurveModel::hyperelliptic(5, &[1, 0, 0, 0, 3]).unwrap();
        let pts = c.closed_points(2).unwrap();
        assert!(pts.iter().any(|p| p.id == "2:inf"));
        assert!(!pts.iter().any(|p| p.id.starts_with("1:inf")));
        assert!(c.partition_check(3).unwrap());
    }

    #[test]
    fn curve_over_nonprime_field() {
        // a1..a6 with a6 = the generator class of F_9
        let c = CurveModel::new(
            CurveKind::EllipticWeierstrass,
            9,
            &[Coef::Int(0), Coef::Int(0), Coef::Int(0), Coef::Int(1), Coef::Coords(vec![0, 1])],
        )
        .unwrap();
        let z = c.zeta().unwrap();
        assert_eq!(z.count(1), c.count_points(1).unwrap() as i128);
        assert!(c.partition_check(2).unwrap());
    }

    #[test]
    fn budget_guard() {
        let c = CurveModel::elliptic(7, [0, 0, 0, 1, 0]).unwrap();
        let err = c.count_points(9).unwrap_err();
        assert_eq!(err.kind(), "budget-exceeded");
    }

    #[test]
    fn group_law_is_associative_on_samples() {
        let c = CurveModel::elliptic(5, [1, 2, 3, 1, 3]).unwrap();
        let e = c.group(2).unwrap();
        let pts = e.points();
        assert_eq!(pts.len() as u64, c.count_points(2).unwrap());
        for (i, p) in pts.iter().enumerate().step_by(3) {
            for q in pts.iter().skip(i).step_by(5) {
                assert!(e.contains(&e.add(p, q)));
                for r in pts.iter().step_by(7) {
                    assert_eq!(e.add(&e.add(p, q), r), e.add(p, &e.add(q, r)));
                }
            }
        }
        let n = pts.len() as u64;
        assert!(pts.iter().all(|p| e.mul(n, p) == CurvePoint::Infinity));
    }
}
