//! Truncated Euler products over closed points, their mod-p shape, and the
//! jump-degree bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::curve::ClosedPoint;
use crate::error::{Error, Result};
use crate::family::{CrystalFamily, FactorCoef, LocalFactor};
use crate::polygon::int;

/// c_0 + c_1 t + .. + c_{n-1} t^{n-1} with coefficients modulo p^precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    p: u64,
    precision: u32,
    coeffs: Vec<BigInt>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            p: u64,
            precision: u32,
            order: usize,
            coefficients: Vec<String>,
            #[serde(skip)]
            _m: std::marker::PhantomData<&'a ()>,
        }
        Repr {
            p: self.p,
            precision: self.precision,
            order: self.coeffs.len(),
            coefficients: self.coeffs.iter().map(|c| c.to_string()).collect(),
            _m: std::marker::PhantomData,
        }
        .serialize(s)
    }
}

impl TruncatedSeries {
    pub fn new(p: u64, precision: u32, coeffs: Vec<BigInt>) -> Self {
        let m = num_traits::pow(BigInt::from(p), precision as usize);
        let coeffs = coeffs.into_iter().map(|c| c.mod_floor(&m)).collect();
        TruncatedSeries { p, precision, coeffs }
    }

    pub fn one(p: u64, precision: u32, order: usize) -> Self {
        let mut c = vec![BigInt::zero(); order];
        if order > 0 {
            c[0] = BigInt::one();
        }
        Self::new(p, precision, c)
    }

    pub fn from_ints(p: u64, precision: u32, order: usize, v: &[i64]) -> Self {
        let mut c: Vec<BigInt> = v.iter().take(order).map(|&x| BigInt::from(x)).collect();
        c.resize(order, BigInt::zero());
        Self::new(p, precision, c)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self::new(self.p, precision.min(self.precision), self.coeffs.clone())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.p, self.precision, self.coeffs[..order.min(self.order())].to_vec())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut c = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Self::new(self.p, self.precision.min(o.precision), c)
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = num_traits::pow(BigInt::from(self.p), self.precision as usize);
        let c0 = self.coeffs.first().ok_or_else(|| Error::config("series", "empty series"))?;
        let inv0 = c0.modinv(&m).ok_or_else(|| Error::config("series", "constant term is not a unit"))?;
        let mut b: Vec<BigInt> = vec![inv0.clone()];
        for n in 1..self.order() {
            let mut acc = BigInt::zero();
            for k in 1..=n {
                acc += &self.coeffs[k] * &b[n - k];
            }
            b.push((-acc * &inv0).mod_floor(&m));
        }
        Ok(Self::new(self.p, self.precision, b))
    }

    /// Σ_k poly_k t^{k·step}.
    pub fn from_poly_in_power(p: u64, precision: u32, order: usize, poly: &[BigInt], step: usize) -> Self {
        let mut c = vec![BigInt::zero(); order];
        for (k, v) in poly.iter().enumerate() {
            if k * step < order {
                c[k * step] = v.clone();
            }
        }
        Self::new(p, precision, c)
    }

    pub fn mod_p(&self) -> Vec<u64> {
        let p = BigInt::from(self.p);
        self.coeffs.iter().map(|c| u64::try_from(c.mod_floor(&p)).unwrap()).collect()
    }
}

/// c_0..c_k of a local factor as integers, sentinels allowed only above the precision.
fn factor_prefix(lf: &LocalFactor, kmax: usize, precision: u32) -> Result<(Vec<BigInt>, u32)> {
    let mut prec = precision;
    if let Some(m) = lf.precision {
        prec = prec.min(m);
    }
    let mut out = Vec::new();
    for k in 0..=kmax.min(lf.rank) {
        match lf.coeffs.get(k) {
            Some(FactorCoef::Known(c)) => out.push(c.clone()),
            Some(FactorCoef::AtLeast(v)) if *v >= prec => out.push(BigInt::zero()),
            Some(FactorCoef::AtLeast(v)) => {
                return Err(Error::precision(format!(
                    "coefficient t^{k} only known to valuation >= {v}, need {prec}"
                )))
            }
            None => return Err(Error::precision(format!("local factor truncated below t^{k}"))),
        }
    }
    Ok((out, prec))
}

/// ∏_{deg x < D} det(1 - F_x t^{deg x})^{-1} modulo (p^precision, t^D).
pub fn l_series(family: &CrystalFamily, order: usize, precision: u32) -> Result<TruncatedSeries> {
    let p = family.p();
    if order == 0 {
        return Ok(TruncatedSeries::one(p, precision, 0));
    }
    let pts = family.points(order as u32 - 1)?;
    let factors: Vec<TruncatedSeries> = pts
        .par_iter()
        .map(|x| euler_factor(family, x, order, precision))
        .collect::<Result<_>>()?;
    Ok(factors.iter().fold(TruncatedSeries::one(p, precision, order), |acc, f| acc.mul(f)))
}

fn euler_factor(family: &CrystalFamily, x: &ClosedPoint, order: usize, precision: u32) -> Result<TruncatedSeries> {
    let d = x.degree as usize;
    let kmax = (order - 1) / d;
    let lf = family.local_factor(x)?;
    let (poly, prec) = factor_prefix(&lf, kmax, precision)?;
    TruncatedSeries::from_poly_in_power(family.p(), prec, order, &poly, d).inverse()
}

/// ∏_{x in S} (1 - t^{deg x})^{±1} mod (p, t^D).
fn point_product(p: u64, order: usize, degrees: impl Iterator<Item = u32>, invert: bool) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::one(p, 1, order);
    for d in degrees {
        let f = TruncatedSeries::from_poly_in_power(p, 1, order, &[BigInt::one(), -BigInt::one()], d as usize);
        acc = acc.mul(&if invert { f.inverse()? } else { f });
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitResidue {
    pub id: String,
    pub degree: u32,
    /// unit eigenvalue modulo p
    pub u: u64,
    /// u^{q-1} modulo p
    pub u_normalized: u64,
    /// least e >= 1 with u^e ≡ 1 (mod p)
    pub order: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Normalization {
    #[serde(skip)]
    pub family: CrystalFamily,
    pub exponent: u32,
    pub residues: Vec<UnitResidue>,
    /// every normalized residue is 1
    pub trivial: bool,
}

fn mult_order(u: u64, p: u64) -> u64 {
    let mut x = u % p;
    let mut e = 1;
    while x != 1 {
        x = x * u % p;
        e += 1;
    }
    e
}

/// Passes to the (q-1)-st tensor power so unit-root residues become 1 at
/// base-field points. Points of degree <= `max_degree` are checked; the
/// returned family keeps local factors up to t^kmax when `kmax` is given.
pub fn normalize_unit_character(family: &CrystalFamily, max_degree: u32, kmax: Option<usize>) -> Result<Normalization> {
    let g = family.generic_polygon(max_degree)?;
    match g.polygon.initial_slope() {
        Some((s, 1)) if s == int(0) => {}
        other => {
            return Err(Error::SlopeHypothesis(format!(
                "generic initial slope must be 0 with multiplicity 1, found {other:?} in {}",
                g.polygon
            )))
        }
    }
    let p = family.p();
    let n = (family.q() - 1) as u32;
    let pts = family.points(max_degree)?;
    let residues: Vec<Option<UnitResidue>> = pts
        .par_iter()
        .map(|x| {
            if !family.is_ordinary_at(x)? {
                return Ok(None);
            }
            let lf = family.local_factor(x)?;
            let c1 = match lf.coeffs.get(1) {
                Some(FactorCoef::Known(c)) => c.clone(),
                _ => return Err(Error::precision("linear coefficient unknown")),
            };
            // P_x ≡ 1 - u t (mod p) when the unit root is simple
            let u = u64::try_from((-c1).mod_floor(&BigInt::from(p))).unwrap();
            if u == 0 {
                return Err(Error::SlopeHypothesis(format!("unit root at {} is not simple", x.id)));
            }
            let un = crate::padic::fp_poly::pow_mod(u, n as u64, p);
            Ok(Some(UnitResidue { id: x.id.clone(), degree: x.degree, u, u_normalized: un, order: mult_order(u, p) }))
        })
        .collect::<Result<_>>()?;
    let residues: Vec<UnitResidue> = residues.into_iter().flatten().collect();
    let trivial = residues.iter().all(|r| r.u_normalized == 1);
    Ok(Normalization { family: family.tensor_power(n, kmax)?, exponent: n, residues, trivial })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Mismatch {
    pub route: &'static str,
    pub k: usize,
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub order: usize,
    pub lhs: Vec<u64>,
    /// ∏_{x in U} (1 - t^{deg x})^{-1}
    pub open_rhs: Vec<u64>,
    /// P_C(t) Zeta(Z)^{-1} / (1 - t), projective bases only
    pub projective_rhs: Option<Vec<u64>>,
    pub unit_points: usize,
    pub jump_degrees: Vec<u32>,
    pub mismatch: Option<Mismatch>,
}

impl CongruenceReport {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn first_mismatch(route: &'static str, a: &[u64], b: &[u64]) -> Option<Mismatch> {
    a.iter().zip(b).position(|(x, y)| x != y).map(|k| Mismatch { route, k, lhs: a[k], rhs: b[k] })
}

/// Checks L(F; t) against the point products modulo (p, t^D). `family`
/// should already be normalized; `reference` (usually the unnormalized
/// family) decides which points have initial slope 0.
pub fn congruence_check(family: &CrystalFamily, order: usize, reference: Option<&CrystalFamily>) -> Result<CongruenceReport> {
    let p = family.p();
    let lhs = l_series(family, order, 1)?.mod_p();
    let reference = reference.unwrap_or(family);
    let pts = family.points(order.saturating_sub(1) as u32)?;
    let flags: Vec<bool> = pts.par_iter().map(|x| reference.is_ordinary_at(x)).collect::<Result<_>>()?;
    let unit: Vec<u32> = pts.iter().zip(&flags).filter(|(_, &u)| u).map(|(x, _)| x.degree).collect();
    let jumps: Vec<u32> = pts.iter().zip(&flags).filter(|(_, &u)| !u).map(|(x, _)| x.degree).collect();
    let open_rhs = point_product(p, order, unit.iter().copied(), true)?.mod_p();
    let mut mismatch = first_mismatch("open", &lhs, &open_rhs);
    let projective_rhs = if family.is_projective() {
        let z = family.base().zeta()?;
        let pc = TruncatedSeries::from_ints(p, 1, order, &z.numerator);
        let rhs = pc
            .mul(&point_product(p, order, jumps.iter().copied(), false)?)
            .mul(&point_product(p, order, std::iter::once(1), true)?)
            .mod_p();
        if mismatch.is_none() {
            mismatch = first_mismatch("projective", &lhs, &rhs);
        }
        Some(rhs)
    } else {
        None
    };
    Ok(CongruenceReport { order, lhs, open_rhs, projective_rhs, unit_points: unit.len(), jump_degrees: jumps, mismatch })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub order: usize,
    pub p_rank: u32,
    pub jump_degree: u64,
    pub expected: u64,
    /// degree of (1 - t) L mod p within the window
    pub observed: Option<usize>,
    pub holds: bool,
}

/// deg((1 - t) L mod p) = e + deg Z, observed inside the window t^0..t^{D-1}.
pub fn degree_identity_check(family: &CrystalFamily, order: usize) -> Result<DegreeReport> {
    if !family.is_projective() {
        return Err(Error::config("family", "the degree identity needs a projective base"));
    }
    let p = family.p();
    let e = family.base().zeta()?.p_rank;
    let pts = family.points(order.saturating_sub(1) as u32)?;
    let flags: Vec<bool> = pts.par_iter().map(|x| family.is_ordinary_at(x)).collect::<Result<_>>()?;
    let jump_degree: u64 = pts.iter().zip(&flags).filter(|(_, &u)| !u).map(|(x, _)| x.degree as u64).sum();
    let expected = e as u64 + jump_degree;
    if order as u64 <= expected {
        return Err(Error::WindowTooSmall { needed: expected + 1, window: order });
    }
    let l = l_series(family, order, 1)?;
    let one_minus_t = TruncatedSeries::from_ints(p, 1, order, &[1, -1]);
    let c = l.mul(&one_minus_t).mod_p();
    let observed = c.iter().rposition(|&x| x != 0);
    Ok(DegreeReport { order, p_rank: e, jump_degree, expected, observed, holds: observed == Some(expected as usize) })
}

fn big_string<S: Serializer>(b: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&b.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub q: u64,
    pub g: u32,
    pub r: u64,
    /// geometric points removed from the base; 0 for projective bases
    pub punctures: u64,
    #[serde(serialize_with = "big_string")]
    pub bound: BigInt,
    pub observed: Option<u64>,
    pub verdict: Option<bool>,
    /// e + deg Z against 1 + 2(g-1) r, when those hypotheses hold
    pub euler_poincare: Option<(u64, i64, bool)>,
}

/// B = r + 2^{1 + (q-1) r} (g - 1).
pub fn bound(q: u64, g: u32, r: u64) -> BoundReport {
    BoundReport { q, g, r, punctures: 0, bound: bound_value(q, g, r, 0), observed: None, verdict: None, euler_poincare: None }
}

/// r + 2^{(q-1) r} (2g - 2 + s), which is B when s = 0.
fn bound_value(q: u64, g: u32, r: u64, s: u64) -> BigInt {
    let e = ((q - 1) * r) as usize;
    BigInt::from(r) + num_traits::pow(BigInt::from(2), e) * (BigInt::from(2 * g as i64 - 2) + BigInt::from(s))
}

/// Compares the observed reduced jump degree within degree <= D with the bound.
pub fn check_bound(family: &CrystalFamily, max_degree: u32) -> Result<BoundReport> {
    let report = family.jump_locus(max_degree)?;
    let base = family.base();
    let g = base.genus();
    let r = family.rank() as u64;
    let q = family.q();
    let punctures: u64 = if family.is_projective() {
        0
    } else {
        let all = base.closed_points(max_degree)?;
        let kept: std::collections::BTreeSet<String> = family.points(max_degree)?.into_iter().map(|x| x.id).collect();
        all.iter().filter(|x| !kept.contains(&x.id)).map(|x| x.degree as u64).sum()
    };
    let b = bound_value(q, g, r, punctures);
    let observed = report.reduced_degree;
    let verdict = BigInt::from(observed) <= b;
    let euler_poincare = if family.is_projective() && g >= 1 {
        let pts = family.points(max_degree)?;
        let init = report.generic.initial_slope();
        if init.is_some_and(|(s, m)| s == int(0) && m == 1) {
            let e = base.zeta()?.p_rank as u64;
            let ordinary: Vec<bool> = pts.par_iter().map(|x| family.is_ordinary_at(x)).collect::<Result<_>>()?;
            let z: u64 = pts.iter().zip(&ordinary).filter(|(_, &o)| !o).map(|(x, _)| x.degree as u64).sum();
            let rhs = 1 + 2 * (g as i64 - 1) * r as i64;
            Some((e + z, rhs, (e + z) as i64 <= rhs))
        } else {
            None
        }
    } else {
        None
    };
    Ok(BoundReport { q, g, r, punctures, bound: b, observed: Some(observed), verdict: Some(verdict), euler_poincare })
}
