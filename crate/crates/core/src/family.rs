//! Families of F-spaces over the closed points of a base curve: local
//! factors, the sampled generic polygon and the jump locus.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{self, ClosedPoint, Coef, CurveModel, CurveRepr};
use crate::error::{Error, Result};
use crate::fspace::{FSpace, FSpaceRepr};
use crate::gf::{Fe, Gf};
use crate::padic::Matrix;
use crate::polygon::{int, NewtonPolygon, PointValue, Q};

/// A local-factor coefficient, possibly only bounded below in valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorCoef {
    Known(BigInt),
    AtLeast(u32),
}

impl Serialize for FactorCoef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FactorCoef::Known(c) => s.serialize_str(&c.to_string()),
            FactorCoef::AtLeast(v) => s.serialize_str(&format!("?{v}")),
        }
    }
}

/// `12`, `"-3"`, `"?"` (valuation at least the table precision) or `"?4"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefRepr {
    Int(i64),
    Str(String),
}

impl CoefRepr {
    fn parse(&self, precision: Option<u32>) -> Result<FactorCoef> {
        let s = match self {
            CoefRepr::Int(c) => return Ok(FactorCoef::Known(BigInt::from(*c))),
            CoefRepr::Str(s) => s.trim(),
        };
        if let Some(rest) = s.strip_prefix('?') {
            if rest.is_empty() {
                let m = precision.ok_or_else(|| Error::config("precision", "a bare \"?\" needs a table precision"))?;
                return Ok(FactorCoef::AtLeast(m));
            }
            let v = rest.parse().map_err(|_| Error::Parse(format!("bad sentinel {s:?}")))?;
            return Ok(FactorCoef::AtLeast(v));
        }
        s.parse::<BigInt>().map(FactorCoef::Known).map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))
    }
}

pub fn ord_p(c: &BigInt, p: u64) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut c = c.clone();
    while (&c % &p).is_zero() {
        c /= &p;
        v += 1;
    }
    Some(v)
}

fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// det(1 - F_x t) at a closed point x of degree `degree` over F_{p^f}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFactor {
    pub p: u64,
    pub f: u32,
    pub degree: u32,
    pub rank: usize,
    /// c_0..c_k; shorter than rank + 1 when truncated
    pub coeffs: Vec<FactorCoef>,
    /// coefficients are known modulo p^precision; `None` means exact
    pub precision: Option<u32>,
}

impl LocalFactor {
    pub fn exact(p: u64, f: u32, degree: u32, coeffs: Vec<BigInt>) -> Self {
        let rank = coeffs.len() - 1;
        LocalFactor { p, f, degree, rank, coeffs: coeffs.into_iter().map(FactorCoef::Known).collect(), precision: None }
    }

    pub fn is_truncated(&self) -> bool {
        self.coeffs.len() < self.rank + 1
    }

    /// ord_p of q^degree, the slope normalizer at this point.
    pub fn normalizer(&self) -> u32 {
        self.f * self.degree
    }

    pub fn valuation(&self, i: usize) -> PointValue {
        match &self.coeffs[i] {
            FactorCoef::AtLeast(v) => PointValue::AtLeast(*v as i64),
            FactorCoef::Known(c) => {
                let c = match self.precision {
                    Some(m) => c.mod_floor(&pow_big(self.p, m)),
                    None => c.clone(),
                };
                match (ord_p(&c, self.p), self.precision) {
                    (None, None) => PointValue::Infinite,
                    (None, Some(m)) => PointValue::AtLeast(m as i64),
                    (Some(v), Some(m)) if v >= m => PointValue::AtLeast(m as i64),
                    (Some(v), _) => PointValue::Exact(v as i64),
                }
            }
        }
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        if self.is_truncated() {
            return Err(Error::precision("truncated local factor has no polygon"));
        }
        let points: Vec<(usize, PointValue)> = (0..=self.rank).map(|i| (i, self.valuation(i))).collect();
        NewtonPolygon::from_valuations(&points, self.rank, &int(self.normalizer() as i64))
    }

    pub fn known(&self) -> Result<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| match c {
                FactorCoef::Known(x) => Ok(x.clone()),
                FactorCoef::AtLeast(v) => Err(Error::precision(format!("coefficient known only to have valuation >= {v}"))),
            })
            .collect()
    }

    /// Power sums s_1..s_n of the inverse roots.
    pub fn power_sums(&self, n: usize) -> Result<Vec<BigInt>> {
        if self.is_truncated() && n > self.coeffs.len() - 1 {
            return Err(Error::precision("power sums beyond a truncated factor"));
        }
        let c = self.known()?;
        let get = |k: usize| c.get(k).cloned().unwrap_or_else(BigInt::zero);
        let mut s: Vec<BigInt> = Vec::with_capacity(n);
        for k in 1..=n {
            let mut acc = -BigInt::from(k) * get(k);
            for j in 1..k {
                acc -= get(j) * &s[k - j - 1];
            }
            s.push(acc);
        }
        if let Some(m) = self.precision {
            let pm = pow_big(self.p, m);
            s.iter_mut().for_each(|x| *x = x.mod_floor(&pm));
        }
        Ok(s)
    }

    /// Rebuilds c_0..c_kmax from power sums, dropping p-adic digits when a
    /// Newton step divides by a multiple of p.
    fn from_power_sums(&self, degree: u32, rank: usize, sums: &[BigInt], kmax: usize) -> Result<LocalFactor> {
        let mut prec = self.precision;
        let mut c: Vec<BigInt> = vec![BigInt::one()];
        for k in 1..=kmax {
            let mut acc = BigInt::zero();
            for j in 1..=k {
                acc += &sums[j - 1] * &c[k - j];
            }
            let kb = BigInt::from(k);
            match prec {
                None => {
                    let (qt, r) = acc.div_rem(&kb);
                    if !r.is_zero() {
                        return Err(Error::Inconsistency(format!("Newton identity not integral at degree {k}")));
                    }
                    c.push(-qt);
                }
                Some(m) => {
                    let v = ord_p(&kb, self.p).unwrap_or(0);
                    if v >= m {
                        return Err(Error::precision("Newton identities exhausted the precision"));
                    }
                    let pv = pow_big(self.p, v);
                    let acc = acc.mod_floor(&pow_big(self.p, m));
                    if !(&acc % &pv).is_zero() {
                        return Err(Error::Inconsistency(format!("Newton identity not integral at degree {k}")));
                    }
                    let m2 = m - v;
                    let pm2 = pow_big(self.p, m2);
                    let unit = (&kb / &pv).mod_floor(&pm2);
                    let inv = unit.modinv(&pm2).expect("unit modulo p^m");
                    c.iter_mut().for_each(|x| *x = x.mod_floor(&pm2));
                    c.push((-(acc / &pv) * inv).mod_floor(&pm2));
                    prec = Some(m2);
                }
            }
        }
        Ok(LocalFactor {
            p: self.p,
            f: self.f,
            degree,
            rank,
            coeffs: c.into_iter().map(FactorCoef::Known).collect(),
            precision: prec,
        })
    }

    /// The factor at the degree-(d·k) point over x: eigenvalues raised to the k-th power.
    pub fn raise(&self, k: u32) -> Result<LocalFactor> {
        if k == 1 {
            return Ok(self.clone());
        }
        let r = self.rank;
        let base = self.power_sums(r * k as usize)?;
        let sums: Vec<BigInt> = (1..=r).map(|m| base[m * k as usize - 1].clone()).collect();
        self.from_power_sums(self.degree * k, r, &sums, r)
    }

    /// The n-th tensor power, keeping only c_0..c_kmax when `kmax` is given.
    pub fn tensor_power(&self, n: u32, kmax: Option<usize>) -> Result<LocalFactor> {
        let rank = self.rank.checked_pow(n).ok_or_else(|| Error::OutOfRange("tensor rank".into()))?;
        let k = kmax.map_or(rank, |k| k.min(rank));
        let sums: Vec<BigInt> = self.power_sums(k)?.iter().map(|s| num_traits::pow(s.clone(), n as usize)).collect();
        self.from_power_sums(self.degree, rank, &sums, k)
    }

    /// The k-th exterior power, via the compound of a companion matrix.
    pub fn exterior(&self, k: usize) -> Result<LocalFactor> {
        if self.is_truncated() {
            return Err(Error::precision("exterior power of a truncated factor"));
        }
        let c = self.known()?;
        let r = self.rank;
        // x^r + c_1 x^{r-1} + .. + c_r has companion with last column -c_r..-c_1
        let zero = BigInt::zero();
        let comp = Matrix::from_fn(r, r, &zero, |i, j| {
            if j + 1 == r {
                -c[r - i].clone()
            } else if i == j + 1 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        });
        let mut cp = comp.compound(k).char_poly();
        cp.reverse();
        if let Some(m) = self.precision {
            let pm = pow_big(self.p, m);
            cp.iter_mut().for_each(|x| *x = x.mod_floor(&pm));
        }
        let mut out = LocalFactor::exact(self.p, self.f, self.degree, cp);
        out.precision = self.precision;
        Ok(out)
    }

    /// Product of factors at the same point.
    pub fn direct_sum(&self, other: &LocalFactor) -> Result<LocalFactor> {
        let (a, b) = (self.known()?, other.known()?);
        let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        let mut out = LocalFactor::exact(self.p, self.f, self.degree, c);
        out.rank = self.rank + other.rank;
        out.precision = match (self.precision, other.precision) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Ok(out)
    }
}

/// Weierstrass coefficients a1, a2, a3, a4, a6 as polynomials in λ over F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    p: u64,
    f: u32,
    /// additive indices in F_q, constant term first
    a: [Vec<u32>; 5],
}

impl Pencil {
    pub fn new(q: u64, a: &[Vec<Coef>]) -> Result<Self> {
        let (p, f) = crate::padic::fp_poly::prime_power(q).ok_or_else(|| Error::config("q", format!("{q} is not a prime power")))?;
        if p == 2 {
            return Err(Error::config("q", "elliptic pencils need odd characteristic"));
        }
        if a.len() != 5 {
            return Err(Error::config("a", "expected five polynomials a1, a2, a3, a4, a6"));
        }
        // reuse the curve parser for F_q coefficients
        let mut polys: [Vec<u32>; 5] = Default::default();
        for (slot, poly) in polys.iter_mut().zip(a) {
            *slot = poly.iter().map(|c| coef_index(c, p, f)).collect::<Result<_>>()?;
        }
        Ok(Pencil { p, f, a: polys })
    }

    /// y^2 = x(x - 1)(x - λ).
    pub fn legendre(q: u64) -> Result<Self> {
        let c = |v: &[i64]| v.iter().map(|&x| Coef::Int(x)).collect::<Vec<_>>();
        Self::new(q, &[c(&[0]), c(&[-1, -1]), c(&[0]), c(&[0, 1]), c(&[0])])
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    fn fiber(&self, gf: &Gf, lambda: Fe) -> [Fe; 5] {
        let emb = gf.subfield_embedding(self.f).expect("F_q inside the residue field");
        let eval = |poly: &[u32]| poly.iter().rev().fold(gf.zero(), |acc, &c| gf.add(gf.mul(acc, lambda), emb[c as usize]));
        [eval(&self.a[0]), eval(&self.a[1]), eval(&self.a[2]), eval(&self.a[3]), eval(&self.a[4])]
    }

    fn field(&self, pt: &ClosedPoint) -> (std::sync::Arc<Gf>, Option<Fe>) {
        let gf = Gf::get(self.p as u32, self.f * pt.degree);
        let x = pt.x.map(|i| gf.from_index(i));
        (gf, x)
    }

    fn smooth_at(&self, pt: &ClosedPoint) -> bool {
        let (gf, x) = self.field(pt);
        x.is_some_and(|l| !gf.is_zero(curve::discriminant(&gf, &self.fiber(&gf, l))))
    }

    /// Frobenius trace of the fiber over the point.
    pub fn trace(&self, pt: &ClosedPoint) -> Result<BigInt> {
        let (gf, x) = self.field(pt);
        let l = x.ok_or_else(|| Error::config("point", "the pencil is not defined at infinity"))?;
        let n = curve::weierstrass_count(&gf, self.fiber(&gf, l));
        Ok(BigInt::from(gf.size() as u64 + 1) - BigInt::from(n))
    }

    fn repr(&self) -> Vec<Vec<Coef>> {
        let gf = Gf::get(self.p as u32, self.f);
        self.a
            .iter()
            .map(|poly| {
                poly.iter()
                    .map(|&i| {
                        let c: Vec<i64> = gf.coords_of_index(i).into_iter().map(i64::from).collect();
                        if self.f == 1 { Coef::Int(c[0]) } else { Coef::Coords(c) }
                    })
                    .collect()
            })
            .collect()
    }
}

fn coef_index(c: &Coef, p: u64, f: u32) -> Result<u32> {
    let coords = match c {
        Coef::Int(x) => vec![*x],
        Coef::Coords(v) => v.clone(),
    };
    if coords.len() > f as usize {
        return Err(Error::config("coefficients", format!("{coords:?} has more than {f} coordinates")));
    }
    Ok(coords.iter().rev().fold(0u64, |acc, &x| acc * p + x.rem_euclid(p as i64) as u64) as u32)
}

/// An explicit table orbit id -> local factor, with an optional degree-1
/// default that is raised to each point's degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntheticTable {
    pub rank: usize,
    pub precision: Option<u32>,
    pub default: Option<Vec<FactorCoef>>,
    pub entries: BTreeMap<String, Vec<FactorCoef>>,
}

impl SyntheticTable {
    fn check(&self) -> Result<()> {
        let all = self.default.iter().map(|c| ("default".to_string(), c)).chain(self.entries.iter().map(|(k, v)| (k.clone(), v)));
        for (id, c) in all {
            if c.len() != self.rank + 1 {
                return Err(Error::config("points", format!("{id}: expected {} coefficients", self.rank + 1)));
            }
            if c[0] != FactorCoef::Known(BigInt::one()) {
                return Err(Error::config("points", format!("{id}: constant term must be 1")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum Provider {
    Constant(FSpace),
    EllipticPencil(Pencil),
    Synthetic(SyntheticTable),
    TensorPower(Box<Provider>, u32),
    DirectSum(Box<Provider>, Box<Provider>),
}

impl Provider {
    fn any(&self, pred: &impl Fn(&Provider) -> bool) -> bool {
        match self {
            Provider::TensorPower(inner, _) => inner.any(pred),
            Provider::DirectSum(a, b) => a.any(pred) || b.any(pred),
            leaf => pred(leaf),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrystalFamily {
    base: CurveModel,
    removed: BTreeSet<String>,
    provider: Provider,
    rank: usize,
    /// only c_0..c_k of local factors are needed (tensor powers for L-series)
    truncation: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericPolygon {
    pub polygon: NewtonPolygon,
    pub status: &'static str,
    /// some sampled point has exactly this polygon
    pub attained: bool,
    pub sampled: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpOrbit {
    pub id: String,
    pub degree: u32,
    pub polygon: NewtonPolygon,
}

#[derive(Clone, Debug, Serialize)]
pub struct JumpReport {
    pub max_degree: u32,
    pub generic: NewtonPolygon,
    pub status: &'static str,
    pub attained: bool,
    pub sampled: usize,
    pub jumps: Vec<JumpOrbit>,
    pub reduced_degree: u64,
}

impl JumpReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["orbit_id", "degree", "slopes"]).map_err(|e| Error::Io(e.to_string()))?;
        for j in &self.jumps {
            w.write_record([j.id.clone(), j.degree.to_string(), j.polygon.to_string()])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn jump_ids(&self) -> BTreeSet<String> {
        self.jumps.iter().map(|j| j.id.clone()).collect()
    }
}

impl CrystalFamily {
    pub fn constant(base: CurveModel, fspace: FSpace) -> Result<Self> {
        let ring = fspace.ring();
        if ring.p() != base.p() || ring.f() != base.f() || ring.d() != 1 {
            return Err(Error::config("fspace", "F-space must live over W(F_q) of the base"));
        }
        if fspace.scale() < 0 {
            return Err(Error::config("fspace", "negative scale has no integral local factors"));
        }
        let rank = fspace.rank();
        Ok(CrystalFamily { base, removed: BTreeSet::new(), provider: Provider::Constant(fspace), rank, truncation: None })
    }

    /// A Weierstrass pencil over the affine λ-line, smooth fibers only.
    pub fn elliptic_pencil(pencil: Pencil) -> Result<Self> {
        let base = CurveModel::projective_line(pencil.q())?;
        let removed = ["1:inf".to_string()].into();
        Ok(CrystalFamily { base, removed, provider: Provider::EllipticPencil(pencil), rank: 2, truncation: None })
    }

    pub fn legendre(q: u64) -> Result<Self> {
        Self::elliptic_pencil(Pencil::legendre(q)?)
    }

    pub fn synthetic(base: CurveModel, table: SyntheticTable) -> Result<Self> {
        table.check()?;
        let rank = table.rank;
        Ok(CrystalFamily { base, removed: BTreeSet::new(), provider: Provider::Synthetic(table), rank, truncation: None })
    }

    /// Removes named closed points from the base.
    pub fn without(mut self, ids: impl IntoIterator<Item = String>) -> Self {
        self.removed.extend(ids);
        self
    }

    pub fn base(&self) -> &CurveModel {
        &self.base
    }
    pub fn provider(&self) -> &Provider {
        &self.provider
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn removed(&self) -> &BTreeSet<String> {
        &self.removed
    }
    pub fn p(&self) -> u64 {
        self.base.p()
    }
    pub fn q(&self) -> u64 {
        self.base.q()
    }

    /// Whether the base is the whole projective curve.
    pub fn is_projective(&self) -> bool {
        self.removed.is_empty() && !self.provider.any(&|p| matches!(p, Provider::EllipticPencil(_)))
    }

    /// The n-th tensor power family; with `kmax`, local factors keep c_0..c_kmax only.
    pub fn tensor_power(&self, n: u32, kmax: Option<usize>) -> Result<Self> {
        let rank = self.rank.checked_pow(n).ok_or_else(|| Error::OutOfRange("tensor rank".into()))?;
        Ok(CrystalFamily {
            base: self.base.clone(),
            removed: self.removed.clone(),
            provider: Provider::TensorPower(Box::new(self.provider.clone()), n),
            rank,
            truncation: kmax,
        })
    }

    /// Closed points of the base of degree at most `max_degree` where the family lives.
    pub fn points(&self, max_degree: u32) -> Result<Vec<ClosedPoint>> {
        let pts = self.base.closed_points(max_degree)?;
        Ok(pts.into_iter().filter(|x| !self.removed.contains(&x.id) && self.defined_at(x)).collect())
    }

    fn defined_at(&self, pt: &ClosedPoint) -> bool {
        !self.provider.any(&|p| matches!(p, Provider::EllipticPencil(pencil) if !pencil.smooth_at(pt)))
    }

    /// Sum of two families over the same base.
    pub fn direct_sum(&self, other: &CrystalFamily) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::config("base", "direct sums need a common base"));
        }
        let mut removed = self.removed.clone();
        removed.extend(other.removed.iter().cloned());
        Ok(CrystalFamily {
            base: self.base.clone(),
            removed,
            provider: Provider::DirectSum(Box::new(self.provider.clone()), Box::new(other.provider.clone())),
            rank: self.rank + other.rank,
            truncation: None,
        })
    }

    /// Whether the initial slope at the point is 0.
    pub fn is_ordinary_at(&self, pt: &ClosedPoint) -> Result<bool> {
        self.ordinary_from(&self.provider, pt)
    }

    fn ordinary_from(&self, provider: &Provider, pt: &ClosedPoint) -> Result<bool> {
        match provider {
            // slopes of a tensor power are n-fold sums
            Provider::TensorPower(inner, _) => self.ordinary_from(inner, pt),
            Provider::DirectSum(a, b) => Ok(self.ordinary_from(a, pt)? || self.ordinary_from(b, pt)?),
            leaf => {
                let np = self.factor_from(leaf, pt)?.newton_polygon()?;
                Ok(np.initial_slope().is_some_and(|(s, _)| s == int(0)))
            }
        }
    }

    pub fn local_factor(&self, pt: &ClosedPoint) -> Result<LocalFactor> {
        self.factor_from(&self.provider, pt)
    }

    fn factor_from(&self, provider: &Provider, pt: &ClosedPoint) -> Result<LocalFactor> {
        let (p, f, d) = (self.p(), self.base.f(), pt.degree);
        match provider {
            Provider::Constant(fs) => {
                let cp = {
                    let mut c = fs.phi().pow(d as u64).char_poly();
                    c.reverse();
                    c
                };
                let scale = fs.scale() as u32 * d;
                let coeffs = cp
                    .iter()
                    .enumerate()
                    .map(|(i, w)| {
                        let c = w
                            .to_integer()
                            .ok_or_else(|| Error::config("fspace", "local factor is not Z_p-rational"))?;
                        Ok(FactorCoef::Known(BigInt::from(c) * pow_big(p, scale * i as u32)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = fs.ring().precision();
                Ok(LocalFactor { p, f, degree: d, rank: fs.rank(), coeffs, precision: Some(m) })
            }
            Provider::EllipticPencil(pencil) => {
                let a = pencil.trace(pt)?;
                let qd = pow_big(p, f * d);
                Ok(LocalFactor::exact(p, f, d, vec![BigInt::one(), -a, qd]))
            }
            Provider::Synthetic(table) => {
                let coeffs = if let Some(c) = table.entries.get(&pt.id) {
                    c.clone()
                } else if let Some(c) = &table.default {
                    let base = LocalFactor { p, f, degree: 1, rank: table.rank, coeffs: c.clone(), precision: table.precision };
                    return base.raise(d);
                } else {
                    return Err(Error::config("points", format!("no local factor for orbit {}", pt.id)));
                };
                Ok(LocalFactor { p, f, degree: d, rank: table.rank, coeffs, precision: table.precision })
            }
            Provider::TensorPower(inner, n) => self.factor_from(inner, pt)?.tensor_power(*n, self.truncation),
            Provider::DirectSum(a, b) => self.factor_from(a, pt)?.direct_sum(&self.factor_from(b, pt)?),
        }
    }

    pub fn newton_polygon_at(&self, pt: &ClosedPoint) -> Result<NewtonPolygon> {
        self.local_factor(pt)?.newton_polygon()
    }

    /// Polygons at every point of degree <= `max_degree`, in enumeration order.
    pub fn sample(&self, max_degree: u32) -> Result<Vec<(ClosedPoint, NewtonPolygon)>> {
        let pts = self.points(max_degree)?;
        pts.into_par_iter()
            .map(|x| {
                let np = self.newton_polygon_at(&x)?;
                Ok((x, np))
            })
            .collect()
    }

    pub fn generic_polygon(&self, max_degree: u32) -> Result<GenericPolygon> {
        let samples = self.sample(max_degree)?;
        generic_of(&samples)
    }

    pub fn jump_locus(&self, max_degree: u32) -> Result<JumpReport> {
        let samples = self.sample(max_degree)?;
        let g = generic_of(&samples)?;
        let mut jumps = Vec::new();
        for (x, np) in &samples {
            if *np == g.polygon {
                continue;
            }
            if !np.dominates(&g.polygon) {
                return Err(Error::Inconsistency(format!(
                    "polygon {np} at {} does not dominate the generic polygon {}",
                    x.id, g.polygon
                )));
            }
            jumps.push(JumpOrbit { id: x.id.clone(), degree: x.degree, polygon: np.clone() });
        }
        let reduced_degree = jumps.iter().map(|j| j.degree as u64).sum();
        Ok(JumpReport {
            max_degree,
            generic: g.polygon,
            status: g.status,
            attained: g.attained,
            sampled: g.sampled,
            jumps,
            reduced_degree,
        })
    }

    /// Jump points detected through initial slopes of exterior powers at the
    /// generic break points, without comparing whole polygons.
    pub fn jump_locus_exterior(&self, max_degree: u32) -> Result<BTreeSet<String>> {
        let samples = self.sample(max_degree)?;
        let g = generic_of(&samples)?.polygon;
        let breaks: Vec<usize> = g.vertices().iter().map(|v| v.0).filter(|&k| k > 0 && k < self.rank).collect();
        let hits: Vec<Option<String>> = samples
            .par_iter()
            .map(|(x, _)| {
                let lf = self.local_factor(x)?;
                for &k in &breaks {
                    let ext = lf.exterior(k)?.newton_polygon()?;
                    let (slope, _) = ext.initial_slope().expect("positive rank");
                    let generic: Q = g.value_at(k);
                    if slope < generic {
                        return Err(Error::Inconsistency(format!("exterior power {k} at {} drops below generic", x.id)));
                    }
                    if slope > generic {
                        return Ok(Some(x.id.clone()));
                    }
                }
                Ok(None)
            })
            .collect::<Result<_>>()?;
        Ok(hits.into_iter().flatten().collect())
    }

    pub fn from_repr(r: &FamilyRepr) -> Result<Self> {
        match r {
            FamilyRepr::Legendre { q } => Self::legendre(*q),
            FamilyRepr::EllipticPencil { q, a } => Self::elliptic_pencil(Pencil::new(*q, a)?),
            FamilyRepr::Constant { base, fspace, remove } => {
                Ok(Self::constant(CurveModel::from_repr(base)?, fspace.build()?)?.without(remove.clone()))
            }
            FamilyRepr::Synthetic { base, rank, precision, default, points, remove } => {
                let parse = |c: &[CoefRepr]| c.iter().map(|x| x.parse(*precision)).collect::<Result<Vec<_>>>();
                let default = default.as_deref().map(parse).transpose()?;
                let mut entries = BTreeMap::new();
                for e in points {
                    if entries.insert(e.id.clone(), parse(&e.coeffs)?).is_some() {
                        return Err(Error::config("points", format!("orbit {} listed twice", e.id)));
                    }
                }
                let table = SyntheticTable { rank: *rank, precision: *precision, default, entries };
                Ok(Self::synthetic(CurveModel::from_repr(base)?, table)?.without(remove.clone()))
            }
        }
    }

    /// Serializable form; tensor-power families have none.
    pub fn to_repr(&self) -> Option<FamilyRepr> {
        let remove: Vec<String> = self.removed.iter().cloned().collect();
        let coef = |c: &FactorCoef| match c {
            FactorCoef::Known(x) => CoefRepr::Str(x.to_string()),
            FactorCoef::AtLeast(v) => CoefRepr::Str(format!("?{v}")),
        };
        match &self.provider {
            Provider::EllipticPencil(p) => Some(FamilyRepr::EllipticPencil { q: p.q(), a: p.repr() }),
            Provider::Constant(fs) => Some(FamilyRepr::Constant {
                base: self.base.to_repr(),
                fspace: FSpaceRepr::from_fspace(fs),
                remove,
            }),
            Provider::Synthetic(t) => Some(FamilyRepr::Synthetic {
                base: self.base.to_repr(),
                rank: t.rank,
                precision: t.precision,
                default: t.default.as_ref().map(|d| d.iter().map(coef).collect()),
                points: t
                    .entries
                    .iter()
                    .map(|(id, c)| PointEntry { id: id.clone(), coeffs: c.iter().map(coef).collect() })
                    .collect(),
                remove,
            }),
            Provider::TensorPower(..) | Provider::DirectSum(..) => None,
        }
    }
}

fn generic_of(samples: &[(ClosedPoint, NewtonPolygon)]) -> Result<GenericPolygon> {
    let Some((_, first)) = samples.first() else {
        return Err(Error::config("max_degree", "no closed points sampled"));
    };
    for (x, np) in samples {
        if np.rank() != first.rank() || np.height() != first.height() {
            return Err(Error::Inconsistency(format!(
                "endpoint ({}, {}) at {} differs from ({}, {})",
                np.rank(),
                np.height(),
                x.id,
                first.rank(),
                first.height()
            )));
        }
    }
    let polys: Vec<NewtonPolygon> = samples.iter().map(|(_, np)| np.clone()).collect();
    let polygon = NewtonPolygon::hull_of(&polys);
    let attained = polys.iter().any(|np| *np == polygon);
    Ok(GenericPolygon { polygon, status: "empirical", attained, sampled: samples.len() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointEntry {
    pub id: String,
    pub coeffs: Vec<CoefRepr>,
}

/// Family TOML, tagged by `provider`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "kebab-case")]
pub enum FamilyRepr {
    Legendre {
        q: u64,
    },
    EllipticPencil {
        q: u64,
        a: Vec<Vec<Coef>>,
    },
    Constant {
        base: CurveRepr,
        fspace: FSpaceRepr,
        #[serde(default)]
        remove: Vec<String>,
    },
    Synthetic {
        base: CurveRepr,
        rank: usize,
        #[serde(default)]
        precision: Option<u32>,
        #[serde(default)]
        default: Option<Vec<CoefRepr>>,
        #[serde(default)]
        points: Vec<PointEntry>,
        #[serde(default)]
        remove: Vec<String>,
    },
}
