//! (φ,∇)-modules over W(F_q)[[t]] / (p^M, t^N): special and generic Newton
//! polygons, unit-root sub-objects and slope filtrations.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fspace::{EntryRepr, FSpace};
use crate::gf::Gf;
use crate::padic::{Embedding, Frobenius, Matrix, Ring, RingSpec, Val, WittElement, WittMatrix};
use crate::polygon::{int, format_rat, NewtonPolygon, PointValue, Q};
use crate::series::{Series, TruncSeriesRing};

pub type SeriesMatrix = Matrix<Series>;

#[derive(Clone, Debug)]
pub struct PhiNablaModule {
    ring: TruncSeriesRing,
    phi: SeriesMatrix,
    nabla: Option<SeriesMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertStatus {
    Certified,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericCertificate {
    pub lower: NewtonPolygon,
    pub upper: NewtonPolygon,
    pub status: CertStatus,
    /// number of specialization points sampled for the upper estimate
    pub samples: usize,
    /// sampled points whose polygon could not be certified at this precision
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub struct UnitRootSub {
    /// n x r0 basis, identity on the pivot rows
    pub basis: SeriesMatrix,
    pub pivots: Vec<usize>,
    /// Frobenius restricted to the sub-object
    pub restricted: SeriesMatrix,
    /// Frobenius on the quotient
    pub quotient: SeriesMatrix,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct FiltrationStep {
    pub slope: Q,
    /// basis of the cumulative sub-object for slopes <= `slope`
    pub basis: SeriesMatrix,
}

/// Knobs for the constancy check run before extraction.
#[derive(Clone, Copy, Debug)]
pub struct ExtractOptions {
    /// degree bound for the specialization points of the generic estimate
    pub sample_degree: u32,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { sample_degree: 2 }
    }
}

impl PhiNablaModule {
    pub fn new(phi: SeriesMatrix, nabla: Option<SeriesMatrix>) -> Result<Self> {
        if !phi.is_square() || phi.rows() == 0 {
            return Err(Error::config("phi", "Frobenius matrix must be square and nonempty"));
        }
        let ring = phi.proto().ring().clone();
        if let Val::AtLeast(m) = phi.det().gauss_valuation() {
            return Err(Error::precision(format!("det(Phi) vanishes mod (p^{m}, t^{})", ring.order())));
        }
        if let Some(n) = &nabla {
            if n.rows() != phi.rows() || n.cols() != phi.cols() {
                return Err(Error::config("nabla", "connection matrix has the wrong shape"));
            }
        }
        let module = PhiNablaModule { ring, phi, nabla };
        if module.nabla.is_some() && !module.is_horizontal() {
            return Err(Error::config("nabla", "Frobenius is not horizontal for the connection"));
        }
        Ok(module)
    }

    pub fn ring(&self) -> &TruncSeriesRing {
        &self.ring
    }
    pub fn phi(&self) -> &SeriesMatrix {
        &self.phi
    }
    pub fn nabla(&self) -> Option<&SeriesMatrix> {
        self.nabla.as_ref()
    }
    pub fn rank(&self) -> usize {
        self.phi.rows()
    }
    pub fn base(&self) -> &RingSpec {
        self.ring.base()
    }

    /// ∂Φ + NΦ - φ'(t) Φ φ(N); it vanishes below t^(N-1) for a horizontal Frobenius.
    pub fn horizontality_residual(&self) -> Option<SeriesMatrix> {
        let n = self.nabla.as_ref()?;
        let dphi = self.phi.map_same(Series::derivative);
        let dfrob = Series::frob_deriv(&self.ring);
        let rhs = self.phi.mul(&n.frob()).scale(&dfrob);
        Some(dphi.add(&n.mul(&self.phi)).sub(&rhs))
    }

    pub fn is_horizontal(&self) -> bool {
        let top = self.ring.order().saturating_sub(1);
        match self.horizontality_residual() {
            None => true,
            Some(r) => r.entries().all(|s| s.coeffs()[..top].iter().all(WittElement::is_zero)),
        }
    }

    /// Gauge transform by an invertible G: Φ' = G Φ φ(G)^-1, N' = G N G^-1 - G' G^-1.
    pub fn gauge(&self, g: &SeriesMatrix) -> Result<Self> {
        let ginv = g.inverse().ok_or_else(|| Error::config("G", "gauge matrix is not invertible"))?;
        let fginv = g.frob().inverse().expect("φ preserves units");
        let phi = g.mul(&self.phi).mul(&fginv);
        let nabla = self.nabla.as_ref().map(|n| {
            let dg = g.map_same(Series::derivative);
            g.mul(n).mul(&ginv).sub(&dg.mul(&ginv))
        });
        PhiNablaModule::new(phi, nabla)
    }

    /// The F-space at t = 0.
    pub fn special_fspace(&self) -> Result<FSpace> {
        FSpace::new(self.phi.map(|s| s.constant_term().clone(), &WittElement::zero(self.base())))
    }

    pub fn special_np(&self) -> Result<NewtonPolygon> {
        self.special_fspace()?.newton_polygon()
    }

    /// The F-space at the Frobenius-compatible lift of a point of W(F_{q^d}).
    pub fn fspace_at(&self, point: &WittElement, emb: &Embedding) -> Result<FSpace> {
        FSpace::new(self.phi.map(|s| s.eval(point, emb), point))
    }

    /// Hull of the Gauss valuations of det(1 - Φ T).
    pub fn gauss_np(&self) -> Result<NewtonPolygon> {
        let mut cp = self.phi.char_poly();
        cp.reverse();
        let points: Vec<(usize, PointValue)> =
            cp.iter().enumerate().map(|(i, a)| (i, a.gauss_valuation().into())).collect();
        NewtonPolygon::from_valuations(&points, self.rank(), &int(self.base().f() as i64))
    }

    /// Bounds for the generic polygon: the Gauss-valuation hull from below and
    /// the hull of the polygons at all closed points of degree <= `max_degree`
    /// (including t = 0) from above.
    pub fn generic_np_certificate(&self, max_degree: u32) -> Result<GenericCertificate> {
        let lower = self.gauss_np()?;
        let mut polys = vec![self.special_np()?];
        let mut skipped = 0;
        for d in 1..=max_degree {
            let target = self.base().with_degree(d)?;
            let emb = Embedding::new(self.base(), &target)?;
            for point in lift_compatible_points(&self.ring, &target, &emb, d) {
                // F^d multiplies valuations by d; a point whose polygon is out of
                // precision is dropped, which only weakens the upper estimate
                match self.fspace_at(&point, &emb).and_then(|v| v.newton_polygon()) {
                    Ok(p) => polys.push(p),
                    Err(Error::PrecisionInsufficient(_)) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        let samples = polys.len();
        let upper = NewtonPolygon::hull_of(&polys);
        let status = if lower == upper { CertStatus::Certified } else { CertStatus::Indeterminate };
        Ok(GenericCertificate { lower, upper, status, samples, skipped })
    }

    /// The polygon, provided special and generic polygons provably agree.
    pub fn constant_polygon(&self, opts: ExtractOptions) -> Result<NewtonPolygon> {
        let special = self.special_np()?;
        let cert = self.generic_np_certificate(opts.sample_degree)?;
        if special == cert.lower {
            Ok(special)
        } else if special != cert.upper {
            Err(Error::NonConstantPolygon { special: special.to_string(), generic: cert.upper.to_string() })
        } else {
            Err(Error::Indeterminate { lower: cert.lower.to_string(), upper: cert.upper.to_string() })
        }
    }

    /// Unit-root sub-object: the stable image of the iterated Frobenius.
    pub fn unit_root_sub(&self, opts: ExtractOptions) -> Result<UnitRootSub> {
        let poly = self.constant_polygon(opts)?;
        let (r0, cap) = unit_root_plan(&poly, self.base().precision())?;
        let core = extract_unit_root(&self.phi, r0, cap)?;
        let split = split_by_basis(&self.phi, &core.basis, &core.pivots)?;
        if split.quotient.rows() > 0 {
            let q = PhiNablaModule { ring: self.ring.clone(), phi: split.quotient.clone(), nabla: None };
            let qp = q.special_np()?;
            if qp.slopes().iter().any(|(s, _)| !s.is_positive()) {
                return Err(Error::Inconsistency(format!("quotient of the unit-root part has slopes {qp}")));
            }
        }
        Ok(UnitRootSub {
            basis: core.basis,
            pivots: core.pivots,
            restricted: split.restricted,
            quotient: split.quotient,
            iterations: core.iterations,
        })
    }

    /// Slope filtration by repeated unit-root extraction on twisted quotients.
    pub fn slope_filtration(&self, opts: ExtractOptions) -> Result<Vec<FiltrationStep>> {
        let poly = self.constant_polygon(opts)?;
        let f = self.base().f() as i64;
        let groups = poly.slopes();
        let mut ks = Vec::with_capacity(groups.len());
        for (s, _) in &groups {
            let sf = s * int(f);
            if !sf.is_integer() {
                return Err(Error::NonIntegralSlope {
                    slope: format_rat(s),
                    f: f as u32,
                    degree: sf.denom().to_u64().unwrap_or(0),
                });
            }
            ks.push(sf.to_integer().to_i64().ok_or_else(|| Error::OutOfRange("slope too large".into()))?);
        }
        let n = self.rank();
        let proto = self.phi.proto().clone();
        let mut t_all = Matrix::identity(n, &proto);
        let mut cur = self.phi.clone();
        let mut done = 0usize;
        let mut steps = Vec::new();
        let m = self.base().precision();
        for (idx, ((slope, mult), &k)) in groups.iter().zip(&ks).enumerate() {
            let twisted_ring = if k > 0 {
                let low = m
                    .checked_sub(k as u32)
                    .filter(|&x| x > 0)
                    .ok_or_else(|| Error::precision(format!("twisting by p^-{k} exhausts precision {m}")))?;
                self.ring.with_precision(low)?
            } else {
                self.ring.clone()
            };
            let twisted = if k > 0 {
                let entries: Option<Vec<Series>> =
                    cur.entries().map(|s| s.div_p_power(k as u32, &twisted_ring)).collect();
                let entries =
                    entries.ok_or_else(|| Error::LatticeNotDivisible { slope: format_rat(slope), power: k })?;
                let dim = cur.rows();
                Matrix::from_fn(dim, dim, &twisted_ring.zero(), |i, j| entries[i * dim + j].clone())
            } else {
                cur.clone()
            };
            let sub = PhiNablaModule::new(twisted, None)?;
            let sub_poly = sub.special_np()?;
            if sub_poly.initial_slope().map(|(s, _)| s) != Some(Q::zero()) {
                return Err(Error::Inconsistency(format!("twisted quotient has polygon {sub_poly}")));
            }
            let last = idx + 1 == groups.len();
            if last {
                if sub_poly.slopes().len() != 1 {
                    return Err(Error::Inconsistency(format!("last graded piece is not isoclinic: {sub_poly}")));
                }
                done += mult;
                steps.push(FiltrationStep { slope: slope.clone(), basis: first_columns(&t_all, done) });
                break;
            }
            let (r0, cap) = unit_root_plan(&sub_poly, twisted_ring.base().precision())?;
            if r0 != *mult {
                return Err(Error::Inconsistency(format!("slope {slope} has multiplicity {mult}, extracted {r0}")));
            }
            let core = extract_unit_root(sub.phi(), r0, cap)?;
            let lifted = core.basis.map_same(|s| s.with_ring(&self.ring));
            let split = split_by_basis(&cur, &lifted, &core.pivots)?;
            let a_np = PhiNablaModule { ring: self.ring.clone(), phi: split.restricted.clone(), nabla: None }
                .special_np()?;
            if a_np != NewtonPolygon::from_slope_multiplicities(&[(slope.clone(), *mult)]) {
                return Err(Error::Inconsistency(format!("graded piece at slope {slope} has polygon {a_np}")));
            }
            let embed = Matrix::identity(done, &proto).block_diag(&split.transform);
            t_all = if done == 0 { split.transform.clone() } else { t_all.mul(&embed) };
            done += mult;
            steps.push(FiltrationStep { slope: slope.clone(), basis: first_columns(&t_all, done) });
            cur = split.quotient;
        }
        verify_filtration(&self.phi, &t_all, &groups)?;
        Ok(steps)
    }
}

fn first_columns<T: Ring>(m: &Matrix<T>, k: usize) -> Matrix<T> {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..k).collect();
    m.submatrix(&rows, &cols)
}

fn verify_filtration(phi: &SeriesMatrix, t_all: &SeriesMatrix, groups: &[(Q, usize)]) -> Result<()> {
    let tinv = t_all.inverse().ok_or_else(|| Error::Inconsistency("filtration basis is not invertible".into()))?;
    let m = tinv.mul(phi).mul(&t_all.frob());
    let mut start = 0;
    for (_, mult) in groups {
        let end = start + mult;
        for i in end..m.rows() {
            for j in start..end {
                if !m.get(i, j).is_zero() {
                    return Err(Error::Inconsistency("filtration is not Frobenius-stable".into()));
                }
            }
        }
        start = end;
    }
    Ok(())
}

/// Multiplicity of slope 0 and the iteration cap M * rank / (least positive slope) + 2.
fn unit_root_plan(poly: &NewtonPolygon, precision: u32) -> Result<(usize, usize)> {
    let (s0, r0) = poly.initial_slope().ok_or_else(|| Error::SlopeHypothesis("empty polygon".into()))?;
    if !s0.is_zero() {
        return Err(Error::SlopeHypothesis(format!("initial slope is {}, not 0; twist first", format_rat(&s0))));
    }
    let cap = match poly.slopes().get(1) {
        None => 2,
        Some((s, _)) => {
            let bound = int(precision as i64) * int(poly.rank() as i64) / s;
            bound.ceil().to_integer().to_usize().unwrap_or(usize::MAX / 2) + 2
        }
    };
    Ok((r0, cap))
}

/// Points of W(F_{q^d}) lifting every residue of exact degree d over F_q
/// (one per Frobenius orbit, plus 0 when d = 1), chosen with σ(c) = φ(t)|_{t=c}
/// so that specialization commutes with Frobenius.
fn lift_compatible_points(ring: &TruncSeriesRing, target: &RingSpec, emb: &Embedding, d: u32) -> Vec<WittElement> {
    let gf = Gf::get(target.p() as u32, target.residue_degree() as u32);
    let f = target.f();
    let mut out = Vec::new();
    for idx in 0..gf.size() {
        let a = gf.from_index(idx);
        if gf.is_zero(a) {
            if d == 1 {
                out.push(WittElement::zero(target));
            }
            continue;
        }
        if gf.orbit_length(a, f) != d {
            continue;
        }
        // representative: least index in its orbit
        let mut b = a;
        let mut least = true;
        for _ in 1..d {
            b = gf.frobenius(b, f);
            if gf.index(b) < idx {
                least = false;
                break;
            }
        }
        if !least {
            continue;
        }
        let res: Vec<u64> = gf.coords(a).into_iter().map(u64::from).collect();
        let mut c = WittElement::teichmuller(target, &res);
        if !ring.frob_t_is_default() {
            let frob = ring.frob_t();
            for _ in 0..target.precision() {
                c = frob.eval(&c, emb).frobenius_pow(d - 1);
            }
        }
        out.push(c);
    }
    out
}

struct UnitRootCore<T> {
    basis: Matrix<T>,
    pivots: Vec<usize>,
    iterations: usize,
}

struct Reduced<T> {
    basis: Matrix<T>,
    pivots: Vec<usize>,
    residual_zero: bool,
}

/// Greedy elimination with unit pivots over a local ring. The returned basis
/// is the identity on the pivot rows; `residual_zero` says whether the columns
/// left over after elimination vanish identically.
fn reduce_columns<T: Ring>(m: &Matrix<T>) -> Reduced<T> {
    let n = m.rows();
    let mut cols: Vec<Vec<T>> = (0..m.cols()).map(|j| m.column(j)).collect();
    let mut used = vec![false; cols.len()];
    let mut is_pivot_row = vec![false; n];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    loop {
        let found = (0..n)
            .filter(|&i| !is_pivot_row[i])
            .find_map(|i| (0..cols.len()).find(|&j| !used[j] && cols[j][i].is_unit()).map(|j| (i, j)));
        let Some((i, j)) = found else { break };
        let inv = cols[j][i].unit_inverse().expect("pivot is a unit");
        cols[j] = cols[j].iter().map(|x| x.mul(&inv)).collect();
        let pivot = cols[j].clone();
        for (k, col) in cols.iter_mut().enumerate() {
            if k == j || col[i].is_zero() {
                continue;
            }
            let c = col[i].clone();
            for (x, y) in col.iter_mut().zip(&pivot) {
                *x = x.sub(&c.mul(y));
            }
        }
        used[j] = true;
        is_pivot_row[i] = true;
        pivots.push((i, j));
    }
    pivots.sort();
    let residual_zero = cols.iter().zip(&used).all(|(c, &u)| u || c.iter().all(Ring::is_zero));
    let basis_cols: Vec<Vec<T>> = pivots.iter().map(|&(_, j)| cols[j].clone()).collect();
    let proto = m.proto().clone();
    let basis = if basis_cols.is_empty() {
        Matrix::zeros(n, 0, &proto)
    } else {
        Matrix::from_columns(&basis_cols, &proto)
    };
    Reduced { basis, pivots: pivots.into_iter().map(|(i, _)| i).collect(), residual_zero }
}

/// Stable image of Φ φ(Φ) ... φ^(k-1)(Φ): stop once two consecutive
/// normalized images agree and have rank r0.
fn extract_unit_root<T: Ring + Frobenius>(phi: &Matrix<T>, r0: usize, cap: usize) -> Result<UnitRootCore<T>> {
    let mut prod = phi.clone();
    let mut twist = phi.clone();
    let mut prev = reduce_columns(&prod);
    for k in 2..=cap.max(2) {
        twist = twist.frob();
        prod = prod.mul(&twist);
        let cur = reduce_columns(&prod);
        let stable = cur.residual_zero
            && prev.residual_zero
            && cur.pivots.len() == r0
            && cur.pivots == prev.pivots
            && cur.basis == prev.basis;
        if stable {
            return Ok(UnitRootCore { basis: cur.basis, pivots: cur.pivots, iterations: k });
        }
        prev = cur;
    }
    Err(Error::precision(format!(
        "iterated Frobenius image did not stabilize to rank {r0} within {cap} steps"
    )))
}

struct Split<T> {
    transform: Matrix<T>,
    restricted: Matrix<T>,
    quotient: Matrix<T>,
}

/// Complete the basis with the standard vectors off the pivot rows and check
/// that the Frobenius becomes block upper triangular with a unit-determinant
/// top block.
fn split_by_basis<T: Ring + Frobenius>(phi: &Matrix<T>, basis: &Matrix<T>, pivots: &[usize]) -> Result<Split<T>> {
    let n = phi.rows();
    let r0 = basis.cols();
    let proto = phi.proto().clone();
    let mut cols: Vec<Vec<T>> = (0..r0).map(|j| basis.column(j)).collect();
    for i in (0..n).filter(|i| !pivots.contains(i)) {
        let mut e = vec![proto.zero_like(); n];
        e[i] = proto.one_like();
        cols.push(e);
    }
    let t = Matrix::from_columns(&cols, &proto);
    let tinv = t.inverse().ok_or_else(|| Error::Inconsistency("completed basis is not invertible".into()))?;
    let m = tinv.mul(phi).mul(&t.frob());
    for i in r0..n {
        for j in 0..r0 {
            if !m.get(i, j).is_zero() {
                return Err(Error::Inconsistency("extracted span is not Frobenius-stable".into()));
            }
        }
    }
    let top: Vec<usize> = (0..r0).collect();
    let bottom: Vec<usize> = (r0..n).collect();
    let restricted = m.submatrix(&top, &top);
    let quotient = m.submatrix(&bottom, &bottom);
    Ok(Split { transform: t, restricted, quotient })
}

/// Unit-root part of an F-space over a point, by the same image iteration.
pub fn fspace_unit_root(v: &FSpace) -> Result<(WittMatrix, Vec<usize>)> {
    if v.scale() != 0 {
        return Err(Error::config("scale", "unit-root extraction needs an integral Frobenius"));
    }
    let poly = v.newton_polygon()?;
    let (r0, cap) = unit_root_plan(&poly, v.ring().precision())?;
    let core = extract_unit_root(v.phi(), r0, cap)?;
    split_by_basis(v.phi(), &core.basis, &core.pivots)?;
    Ok((core.basis, core.pivots))
}

/// Normal form of the column span of a matrix over a local ring, when the
/// span is a free direct summand.
pub fn span_normal_form<T: Ring>(m: &Matrix<T>) -> Option<(Matrix<T>, Vec<usize>)> {
    let r = reduce_columns(m);
    r.residual_zero.then_some((r.basis, r.pivots))
}

/// Serialized module: each series is a coefficient list, entries integers or
/// coordinate vectors.
#[derive(Serialize, Deserialize)]
pub struct ModuleRepr {
    pub p: u64,
    #[serde(default = "one")]
    pub f: u32,
    #[serde(rename = "M")]
    pub precision: u32,
    #[serde(rename = "N")]
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frob_t: Option<Vec<EntryRepr>>,
    pub phi: Vec<Vec<Vec<EntryRepr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla: Option<Vec<Vec<Vec<EntryRepr>>>>,
}

fn one() -> u32 {
    1
}

impl ModuleRepr {
    pub fn build(&self) -> Result<PhiNablaModule> {
        let base = RingSpec::new(self.p, self.f, 1, self.precision)?;
        let ring = match &self.frob_t {
            None => TruncSeriesRing::new(&base, self.order)?,
            Some(c) => {
                let coords: Vec<Vec<i64>> = c
                    .iter()
                    .map(|e| match e {
                        EntryRepr::Int(v) => vec![*v],
                        EntryRepr::Coords(v) => v.clone(),
                    })
                    .collect();
                TruncSeriesRing::with_frobenius(&base, self.order, &coords)?
            }
        };
        let matrix = |rows: &Vec<Vec<Vec<EntryRepr>>>, field: &str| -> Result<SeriesMatrix> {
            let built = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|s| {
                            if s.len() > self.order {
                                return Err(Error::config(field, format!("series longer than N = {}", self.order)));
                            }
                            let c = s.iter().map(|e| e.to_witt(&base)).collect::<Result<Vec<_>>>()?;
                            Ok(ring.from_coeffs(&c))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Matrix::from_rows(built).ok_or_else(|| Error::config(field, "rows must be nonempty and equal length"))
        };
        let phi = matrix(&self.phi, "phi")?;
        let nabla = self.nabla.as_ref().map(|n| matrix(n, "nabla")).transpose()?;
        PhiNablaModule::new(phi, nabla)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::rat;

    fn np(s: &[(i64, i64)]) -> NewtonPolygon {
        NewtonPolygon::from_slopes(&s.iter().map(|&(n, d)| rat(n, d)).collect::<Vec<Q>>())
    }

    fn module(p: u64, m: u32, n: usize, rows: &[&[&[i64]]]) -> PhiNablaModule {
        let base = RingSpec::new(p, 1, 1, m).unwrap();
        let ring = TruncSeriesRing::new(&base, n).unwrap();
        let phi = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| ring.from_ints(s)).collect()).collect())
            .unwrap();
        PhiNablaModule::new(phi, None).unwrap()
    }

    #[test]
    fn special_polygons() {
        assert_eq!(module(5, 6, 8, &[&[&[1], &[0]], &[&[0], &[5]]]).special_np().unwrap(), np(&[(0, 1), (1, 1)]));
        assert_eq!(module(5, 6, 8, &[&[&[1], &[0, 1]], &[&[0], &[5]]]).special_np().unwrap(), np(&[(0, 1), (1, 1)]));
        assert_eq!(module(5, 6, 8, &[&[&[0, 1], &[5]], &[&[1], &[0]]]).special_np().unwrap(), np(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn generic_certificates() {
        let c = module(5, 6, 8, &[&[&[1], &[0]], &[&[0], &[5]]]).generic_np_certificate(1).unwrap();
        assert_eq!(c.status, CertStatus::Certified);
        assert_eq!(c.lower, np(&[(0, 1), (1, 1)]));
        let c = module(5, 6, 8, &[&[&[0, 1], &[5]], &[&[1], &[0]]]).generic_np_certificate(1).unwrap();
        assert_eq!((c.lower.clone(), c.upper.clone()), (np(&[(0, 1), (1, 1)]), np(&[(0, 1), (1, 1)])));
        assert_eq!(c.status, CertStatus::Certified);
        let c = module(5, 6, 8, &[&[&[0, 5], &[5]], &[&[1], &[0]]]).generic_np_certificate(1).unwrap();
        assert_eq!((c.lower, c.upper), (np(&[(1, 2), (1, 2)]), np(&[(1, 2), (1, 2)])));
    }

    #[test]
    fn diagonal_unit_root() {
        let m = module(5, 6, 8, &[&[&[1], &[0]], &[&[0], &[5]]]);
        let u = m.unit_root_sub(ExtractOptions::default()).unwrap();
        assert_eq!(u.pivots, vec![0]);
        assert_eq!(u.basis.column(0), vec![m.ring().one(), m.ring().zero()]);
    }

    #[test]
    fn non_constant_is_rejected() {
        let m = module(5, 6, 8, &[&[&[0, 1], &[5]], &[&[1], &[0]]]);
        assert!(matches!(m.unit_root_sub(ExtractOptions::default()), Err(Error::NonConstantPolygon { .. })));
    }

    #[test]
    fn connection_example_is_horizontal() {
        let base = RingSpec::new(5, 1, 1, 6).unwrap();
        let ring = TruncSeriesRing::new(&base, 8).unwrap();
        let phi = Matrix::from_rows(vec![
            vec![ring.from_ints(&[1]), ring.from_ints(&[0, 5, 0, 0, 0, -1])],
            vec![ring.zero(), ring.from_ints(&[5])],
        ])
        .unwrap();
        let nabla = Matrix::from_rows(vec![vec![ring.zero(), ring.from_ints(&[-1])], vec![ring.zero(), ring.zero()]])
            .unwrap();
        let m = PhiNablaModule::new(phi.clone(), Some(nabla.clone())).unwrap();
        assert!(m.is_horizontal());
        let bad = Matrix::from_rows(vec![vec![ring.zero(), ring.from_ints(&[1])], vec![ring.zero(), ring.zero()]])
            .unwrap();
        assert!(PhiNablaModule::new(phi, Some(bad)).is_err());
        let g = Matrix::from_rows(vec![
            vec![ring.from_ints(&[1, 2]), ring.from_ints(&[3, 0, 1])],
            vec![ring.from_ints(&[0, 1]), ring.from_ints(&[2, 4])],
        ])
        .unwrap();
        assert!(m.gauge(&g).unwrap().is_horizontal());
    }

    #[test]
    fn filtration_of_diagonal() {
        let m = module(3, 6, 6, &[&[&[1], &[0], &[0]], &[&[0], &[3], &[0]], &[&[0], &[0], &[9]]]);
        let steps = m.slope_filtration(ExtractOptions::default()).unwrap();
        let slopes: Vec<Q> = steps.iter().map(|s| s.slope.clone()).collect();
        assert_eq!(slopes, vec![int(0), int(1), int(2)]);
        assert_eq!(steps.iter().map(|s| s.basis.cols()).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn non_integral_slope_names_extension() {
        let m = module(5, 6, 6, &[&[&[0, 5], &[5]], &[&[1], &[0]]]);
        match m.slope_filtration(ExtractOptions { sample_degree: 1 }) {
            Err(Error::NonIntegralSlope { degree, .. }) => assert_eq!(degree, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_module() {
        let s = r#"{"p":5,"M":6,"N":8,"phi":[[[1],[0,5,0,0,0,-1]],[[],[5]]],"nabla":[[[],[-1]],[[],[]]]}"#;
        let r: ModuleRepr = serde_json::from_str(s).unwrap();
        let m = r.build().unwrap();
        assert!(m.nabla().is_some());
        assert_eq!(m.special_np().unwrap(), np(&[(0, 1), (1, 1)]));
    }
}
