//! F-spaces over a finite-field point: a σ-semilinear Frobenius F = p^scale · Φσ
//! on W(F_{q^d})^n, known modulo p^M.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{Matrix, RingSpec, Val, WittElement, WittMatrix};
use crate::polygon::{int, rat, NewtonPolygon, PointValue};

#[derive(Clone, Debug, PartialEq)]
pub struct FSpace {
    phi: WittMatrix,
    /// F = p^scale · Φσ; lets negative slopes live on an integral matrix
    scale: i64,
}

impl FSpace {
    pub fn new(phi: WittMatrix) -> Result<Self> {
        Self::with_scale(phi, 0)
    }

    pub fn with_scale(phi: WittMatrix, scale: i64) -> Result<Self> {
        if !phi.is_square() || phi.rows() == 0 {
            return Err(Error::config("phi", "Frobenius matrix must be square and nonempty"));
        }
        if let Val::AtLeast(m) = phi.det().valuation() {
            return Err(Error::precision(format!(
                "det(phi) vanishes mod p^{m}; F is not certified bijective at this precision"
            )));
        }
        Ok(FSpace { phi, scale })
    }

    pub fn ring(&self) -> &RingSpec {
        self.phi.proto().ring()
    }
    pub fn phi(&self) -> &WittMatrix {
        &self.phi
    }
    pub fn scale(&self) -> i64 {
        self.scale
    }
    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    /// Matrix of the linear map (Φσ)^d, the integral part of F^d.
    pub fn linearize(&self) -> WittMatrix {
        let d = self.ring().d();
        let mut acc = self.phi.clone();
        let mut cur = self.phi.clone();
        for _ in 1..d {
            cur = cur.frob();
            acc = acc.mul(&cur);
        }
        acc
    }

    /// Coefficients a_0..a_n of det(1 - (Φσ)^d T).
    pub fn local_factor(&self) -> Vec<WittElement> {
        let mut cp = self.linearize().char_poly();
        cp.reverse();
        cp
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        let ring = self.ring();
        let points: Vec<(usize, PointValue)> =
            self.local_factor().iter().enumerate().map(|(i, a)| (i, a.valuation().into())).collect();
        let normalizer = int((ring.f() * ring.d()) as i64);
        let np = NewtonPolygon::from_valuations(&points, self.rank(), &normalizer)?;
        Ok(np.shift(&rat(self.scale, ring.f() as i64)))
    }

    /// The Dieudonné-Manin module K[F]/(F^r - p^s), realized by a companion matrix.
    pub fn standard_module(s: i64, r: i64, ring: &RingSpec) -> Result<Self> {
        if r < 1 {
            return Err(Error::config("r", "rank must be positive"));
        }
        if s.gcd(&r) != 1 {
            return Err(Error::NotCoprime { r, s });
        }
        let k = if s < 0 { (-s + r - 1) / r } else { 0 };
        let e = s + k * r;
        if e >= ring.precision() as i64 {
            return Err(Error::precision(format!("p^{e} vanishes at precision {}", ring.precision())));
        }
        let n = r as usize;
        let proto = WittElement::zero(ring);
        let phi = Matrix::from_fn(n, n, &proto, |i, j| {
            if i == 0 && j == n - 1 {
                WittElement::p_power(ring, e as u32)
            } else if i == j + 1 {
                WittElement::one(ring)
            } else {
                proto.clone()
            }
        });
        Self::with_scale(phi, -k)
    }

    pub fn twist(&self, c: &WittElement) -> Result<Self> {
        Self::with_scale(self.phi.scale(c), self.scale)
    }

    /// F' = p^k F.
    pub fn twist_p(&self, k: i64) -> Self {
        FSpace { phi: self.phi.clone(), scale: self.scale + k }
    }

    /// Dual F-space. Inverting Φ = p^v u · (adjugate)^-1 costs v digits of precision.
    pub fn dual(&self) -> Result<Self> {
        let det = self.phi.det();
        let v = match det.valuation() {
            Val::Finite(v) => v,
            Val::AtLeast(m) => return Err(Error::precision(format!("det(phi) vanishes mod p^{m}"))),
        };
        let ring = self.ring();
        if v >= ring.precision() {
            return Err(Error::precision("no precision left after inverting det(phi)"));
        }
        let low = ring.with_precision(ring.precision() - v)?;
        let unit = det.div_p_power(v, &low).expect("valuation was computed exactly");
        let uinv = unit.inverse().expect("quotient by p^v(det) is a unit");
        let adj_t = self.phi.adjugate().transpose().map_same(|x| x.with_ring(&low));
        Self::with_scale(adj_t.scale(&uinv), -self.scale - v as i64)
    }

    pub fn tensor(&self, other: &FSpace) -> Result<Self> {
        self.check_ring(other)?;
        Self::with_scale(self.phi.kron(&other.phi), self.scale + other.scale)
    }

    pub fn direct_sum(&self, other: &FSpace) -> Result<Self> {
        self.check_ring(other)?;
        let s = self.scale.min(other.scale);
        let lift = |v: &FSpace| {
            let k = (v.scale - s) as u32;
            v.phi.scale(&WittElement::p_power(v.ring(), k))
        };
        Self::with_scale(lift(self).block_diag(&lift(other)), s)
    }

    pub fn exterior(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.rank() {
            return Err(Error::OutOfRange(format!("exterior power {k} of a rank-{} F-space", self.rank())));
        }
        Self::with_scale(self.phi.compound(k), self.scale * k as i64)
    }

    pub fn tensor_power(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Self::new(Matrix::identity(1, self.phi.proto()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// Change of basis by an invertible U: Φ' = U Φ σ(U)^-1.
    pub fn change_basis(&self, u: &WittMatrix) -> Result<Self> {
        let inv = u.frob().inverse().ok_or_else(|| Error::config("U", "change of basis is not invertible"))?;
        Self::with_scale(u.mul(&self.phi).mul(&inv), self.scale)
    }

    fn check_ring(&self, other: &FSpace) -> Result<()> {
        if !self.ring().same_as(other.ring()) {
            return Err(Error::config("ring", "F-spaces live over different rings"));
        }
        Ok(())
    }
}

/// Serialized F-space: entries are integers or coordinate vectors.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FSpaceRepr {
    pub p: u64,
    #[serde(default = "one_u32")]
    pub f: u32,
    #[serde(default = "one_u32")]
    pub d: u32,
    #[serde(rename = "M")]
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub phi: Vec<Vec<EntryRepr>>,
    #[serde(default)]
    pub scale: i64,
}

fn one_u32() -> u32 {
    1
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum EntryRepr {
    Int(i64),
    Coords(Vec<i64>),
}

impl EntryRepr {
    pub fn to_witt(&self, ring: &RingSpec) -> Result<WittElement> {
        match self {
            EntryRepr::Int(v) => Ok(WittElement::from_int(ring, *v)),
            EntryRepr::Coords(c) => WittElement::from_coords(ring, c),
        }
    }
}

impl FSpaceRepr {
    pub fn build(&self) -> Result<FSpace> {
        let ring = match &self.modulus {
            Some(m) => RingSpec::with_modulus(self.p, self.f, self.d, self.precision, m.clone())?,
            None => RingSpec::new(self.p, self.f, self.d, self.precision)?,
        };
        let rows = self
            .phi
            .iter()
            .map(|r| r.iter().map(|e| e.to_witt(&ring)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let phi = Matrix::from_rows(rows).ok_or_else(|| Error::config("phi", "rows must be nonempty and equal length"))?;
        FSpace::with_scale(phi, self.scale)
    }

    pub fn from_fspace(v: &FSpace) -> Self {
        let ring = v.ring();
        let phi = v
            .phi
            .to_rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| match e.to_integer() {
                        Some(i) => EntryRepr::Int(i as i64),
                        None => EntryRepr::Coords(e.coords().iter().map(|&c| c as i64).collect()),
                    })
                    .collect()
            })
            .collect();
        FSpaceRepr {
            p: ring.p(),
            f: ring.f(),
            d: ring.d(),
            precision: ring.precision(),
            modulus: Some(ring.modulus().to_vec()),
            phi,
            scale: v.scale,
        }
    }
}

impl Serialize for FSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FSpaceRepr::from_fspace(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FSpaceRepr::deserialize(d)?.build().map_err(serde::de::Error::custom)
    }
}
