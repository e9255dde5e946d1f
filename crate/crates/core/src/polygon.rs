//! Newton polygons as exact lower convex hulls.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::Val;

pub type Q = BigRational;

pub fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parse "3", "-1/2" into a rational.
pub fn parse_rat(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad rational {s:?}")));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(parse(n)?, d))
        }
        None => Ok(Q::from_integer(parse(s)?)),
    }
}

/// Valuation data attached to one abscissa before taking the hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointValue {
    Exact(i64),
    /// known to be at least this much, e.g. a coefficient that is 0 mod p^M
    AtLeast(i64),
    /// coefficient known to vanish exactly
    Infinite,
}

impl From<Val> for PointValue {
    fn from(v: Val) -> Self {
        match v {
            Val::Finite(v) => PointValue::Exact(v as i64),
            Val::AtLeast(m) => PointValue::AtLeast(m as i64),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NewtonPolygon {
    /// strictly convex vertices, starting at (0, 0)
    vertices: Vec<(usize, Q)>,
}

impl NewtonPolygon {
    /// The rank-0 polygon.
    pub fn empty() -> Self {
        NewtonPolygon { vertices: vec![(0, Q::zero())] }
    }

    /// Lower convex hull of points with distinct or repeated abscissae. The
    /// leftmost point is taken as the origin of the polygon.
    fn hull(points: &[(usize, Q)]) -> Self {
        let mut pts: BTreeMap<usize, Q> = BTreeMap::new();
        for (x, y) in points {
            pts.entry(*x).and_modify(|v| if y < v { *v = y.clone() }).or_insert_with(|| y.clone());
        }
        let mut hull: Vec<(usize, Q)> = Vec::new();
        for (x, y) in pts {
            while hull.len() >= 2 {
                let (x1, y1) = &hull[hull.len() - 2];
                let (x2, y2) = &hull[hull.len() - 1];
                // drop (x2, y2) unless it lies strictly below the chord
                let lhs = (y2 - y1) * int((x - x1) as i64);
                let rhs = (&y - y1) * int((x2 - x1) as i64);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, y));
        }
        NewtonPolygon { vertices: hull }
    }

    /// Lower convex hull of the union of several polygons' integer points.
    pub fn hull_of(polys: &[NewtonPolygon]) -> Self {
        let pts: Vec<(usize, Q)> =
            polys.iter().flat_map(|p| (0..=p.rank()).map(move |x| (x, p.value_at(x)))).collect();
        if pts.is_empty() {
            return Self::empty();
        }
        Self::hull(&pts)
    }

    /// Polygon with the given slope multiset.
    pub fn from_slopes(slopes: &[Q]) -> Self {
        let mut s = slopes.to_vec();
        s.sort();
        let mut pts = vec![(0usize, Q::zero())];
        let mut acc = Q::zero();
        for (i, sl) in s.iter().enumerate() {
            acc += sl;
            pts.push((i + 1, acc.clone()));
        }
        Self::hull(&pts)
    }

    pub fn from_slope_multiplicities(groups: &[(Q, usize)]) -> Self {
        let mut g: Vec<(Q, usize)> = groups.iter().filter(|(_, m)| *m > 0).cloned().collect();
        g.sort();
        let mut pts = vec![(0usize, Q::zero())];
        let (mut x, mut y) = (0usize, Q::zero());
        for (s, m) in g {
            x += m;
            y += s * int(m as i64);
            pts.push((x, y.clone()));
        }
        Self::hull(&pts)
    }

    /// Lower hull of valuation points, heights divided by `normalizer`.
    ///
    /// Points marked `AtLeast(m)` are ignored when the hull built from the
    /// exact points passes at or below height m over their abscissa; otherwise
    /// the true coefficient could pull the hull down and the polygon cannot
    /// be certified.
    pub fn from_valuations(points: &[(usize, PointValue)], rank: usize, normalizer: &Q) -> Result<Self> {
        if !normalizer.is_positive() {
            return Err(Error::config("normalizer", "must be positive"));
        }
        let exact: Vec<(usize, Q)> = points
            .iter()
            .filter_map(|(x, v)| match v {
                PointValue::Exact(y) => Some((*x, int(*y))),
                _ => None,
            })
            .collect();
        if !exact.iter().any(|(x, y)| *x == 0 && y.is_zero()) {
            return Err(Error::config("points", "the point (0, 0) is required"));
        }
        if !exact.iter().any(|(x, _)| *x == rank) {
            let why = match points.iter().find(|(x, _)| *x == rank) {
                Some((_, PointValue::AtLeast(m))) => {
                    return Err(Error::precision(format!(
                        "top coefficient (index {rank}) has valuation >= {m}; raise precision"
                    )))
                }
                _ => format!("no finite point at the final abscissa {rank}"),
            };
            return Err(Error::config("points", why));
        }
        if let Some((x, _)) = points.iter().find(|(x, _)| *x > rank) {
            return Err(Error::config("points", format!("abscissa {x} exceeds rank {rank}")));
        }
        let raw = Self::hull(&exact);
        for (x, v) in points {
            if let PointValue::AtLeast(m) = v {
                if raw.value_at(*x) > int(*m) {
                    return Err(Error::precision(format!(
                        "coefficient at index {x} is only known to have valuation >= {m}, below the \
                         hull height {}; raise precision",
                        raw.value_at(*x)
                    )));
                }
            }
        }
        let vertices = raw.vertices.into_iter().map(|(x, y)| (x, y / normalizer)).collect();
        Ok(NewtonPolygon { vertices })
    }

    /// Build from explicit vertices, checking the polygon invariants.
    pub fn from_vertices(vertices: Vec<(usize, Q)>) -> Result<Self> {
        if vertices.first() != Some(&(0, Q::zero())) {
            return Err(Error::config("vertices", "must start at (0, 0)"));
        }
        let candidate = NewtonPolygon { vertices };
        let rebuilt = Self::hull(&candidate.vertices);
        if rebuilt != candidate {
            return Err(Error::config("vertices", "not a strictly convex increasing-slope chain"));
        }
        Ok(candidate)
    }

    pub fn vertices(&self) -> &[(usize, Q)] {
        &self.vertices
    }

    pub fn rank(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    pub fn height(&self) -> Q {
        self.vertices.last().map_or_else(Q::zero, |v| v.1.clone())
    }

    /// Distinct slopes with multiplicities, increasing.
    pub fn slopes(&self) -> Vec<(Q, usize)> {
        self.vertices
            .windows(2)
            .map(|w| {
                let dx = w[1].0 - w[0].0;
                ((&w[1].1 - &w[0].1) / int(dx as i64), dx)
            })
            .collect()
    }

    /// Slope multiset, one entry per slot.
    pub fn slope_list(&self) -> Vec<Q> {
        self.slopes().into_iter().flat_map(|(s, m)| std::iter::repeat(s).take(m)).collect()
    }

    pub fn initial_slope(&self) -> Option<(Q, usize)> {
        self.slopes().into_iter().next()
    }

    /// Height of the polygon over an abscissa in [0, rank].
    pub fn value_at(&self, x: usize) -> Q {
        for w in self.vertices.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if x <= *x1 {
                return y0 + (y1 - y0) * int((x - x0) as i64) / int((x1 - x0) as i64);
            }
        }
        self.height()
    }

    /// True iff the endpoints agree and `self` lies on or above `other`.
    pub fn dominates(&self, other: &NewtonPolygon) -> bool {
        self.rank() == other.rank()
            && self.height() == other.height()
            && (0..=self.rank()).all(|x| self.value_at(x) >= other.value_at(x))
    }

    pub fn direct_sum(&self, other: &NewtonPolygon) -> Self {
        let mut g = self.slopes();
        g.extend(other.slopes());
        Self::from_slope_multiplicities(&g)
    }

    pub fn tensor(&self, other: &NewtonPolygon) -> Self {
        let mut g: BTreeMap<Q, usize> = BTreeMap::new();
        for (a, m) in self.slopes() {
            for (b, n) in other.slopes() {
                *g.entry(&a + &b).or_default() += m * n;
            }
        }
        Self::from_slope_multiplicities(&g.into_iter().collect::<Vec<_>>())
    }

    pub fn tensor_power(&self, n: u32) -> Self {
        let mut acc = Self::from_slopes(&[Q::zero()]);
        for _ in 0..n {
            acc = acc.tensor(self);
        }
        acc
    }

    /// Polygon of the k-th exterior power: slopes are the sums over k-element
    /// sub-multisets of slots.
    pub fn exterior_power(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.rank() {
            return Err(Error::OutOfRange(format!("exterior power {k} of a rank-{} polygon", self.rank())));
        }
        let groups = self.slopes();
        let mut out: BTreeMap<Q, BigInt> = BTreeMap::new();
        // choose k_i slots from group i
        fn rec(groups: &[(Q, usize)], k: usize, sum: Q, mult: BigInt, out: &mut BTreeMap<Q, BigInt>) {
            match groups.split_first() {
                None => {
                    if k == 0 {
                        *out.entry(sum).or_default() += mult;
                    }
                }
                Some(((s, m), rest)) => {
                    for take in 0..=(*m).min(k) {
                        let c = binomial(BigInt::from(*m), BigInt::from(take));
                        rec(rest, k - take, &sum + s * int(take as i64), &mult * c, out);
                    }
                }
            }
        }
        rec(&groups, k, Q::zero(), BigInt::one(), &mut out);
        let g: Vec<(Q, usize)> = out
            .into_iter()
            .map(|(s, m)| Ok((s, m.to_usize().ok_or_else(|| Error::OutOfRange("exterior rank overflow".into()))?)))
            .collect::<Result<_>>()?;
        Ok(Self::from_slope_multiplicities(&g))
    }

    /// Add `c` to every slope (a rank-one twist).
    pub fn shift(&self, c: &Q) -> Self {
        let vertices = self.vertices.iter().map(|(x, y)| (*x, y + c * int(*x as i64))).collect();
        NewtonPolygon { vertices }
    }

    /// Negate every slope (the dual).
    pub fn dual(&self) -> Self {
        let s: Vec<Q> = self.slope_list().iter().map(|s| -s).collect();
        Self::from_slopes(&s)
    }
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn format_rat(q: &Q) -> String {
    fmt_q(q)
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.slope_list().iter().map(fmt_q).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

impl fmt::Debug for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NP{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    vertices: Vec<(usize, String)>,
}

impl Serialize for NewtonPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolygonRepr { vertices: self.vertices.iter().map(|(x, y)| (*x, fmt_q(y))).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewtonPolygon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PolygonRepr::deserialize(d)?;
        let v = r
            .vertices
            .into_iter()
            .map(|(x, y)| parse_rat(&y).map(|y| (x, y)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        NewtonPolygon::from_vertices(v).map_err(D::Error::custom)
    }
}

/// SVG plot of one or more polygons on shared axes, vertices labelled and
/// segments annotated with their slopes.
pub fn render_svg(polygons: &[(&str, &NewtonPolygon)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 48.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let max_x = polygons.iter().map(|(_, p)| p.rank()).max().unwrap_or(1).max(1) as f64;
    let ys: Vec<f64> = polygons
        .iter()
        .flat_map(|(_, p)| p.vertices().iter().map(|(_, y)| y.to_f64().unwrap_or(0.0)))
        .collect();
    let min_y = ys.iter().cloned().fold(0.0, f64::min);
    let max_y = ys.iter().cloned().fold(0.0, f64::max).max(min_y + 1.0);
    let sx = |x: f64| PAD + x / max_x * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - min_y) / (max_y - min_y) * (H - 2.0 * PAD);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    );
    out += &format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#888\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(max_x),
        sy(0.0)
    );
    out += &format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#888\"/>\n",
        sx(0.0),
        sy(min_y),
        sx(0.0),
        sy(max_y)
    );
    for (i, (label, p)) in polygons.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = p
            .vertices()
            .iter()
            .map(|(x, y)| format!("{:.1},{:.1}", sx(*x as f64), sy(y.to_f64().unwrap_or(0.0))))
            .collect();
        out += &format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        );
        for w in p.vertices().windows(2) {
            let mx = (w[0].0 + w[1].0) as f64 / 2.0;
            let my = (w[0].1.to_f64().unwrap_or(0.0) + w[1].1.to_f64().unwrap_or(0.0)) / 2.0;
            let slope = (&w[1].1 - &w[0].1) / int((w[1].0 - w[0].0) as i64);
            out += &format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
                sx(mx) + 4.0,
                sy(my) - 4.0 - 14.0 * i as f64,
                fmt_q(&slope)
            );
        }
        out += &format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{color}\">{} {}</text>\n",
            PAD,
            16.0 + 14.0 * i as f64,
            xml_escape(label),
            p
        );
    }
    out += "</svg>\n";
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(s: &[(i64, i64)]) -> NewtonPolygon {
        NewtonPolygon::from_slopes(&s.iter().map(|&(n, d)| rat(n, d)).collect::<Vec<_>>())
    }

    #[test]
    fn valuations_ordinary_and_supersingular() {
        let one = int(1);
        let ord = NewtonPolygon::from_valuations(
            &[(0, PointValue::Exact(0)), (1, PointValue::Exact(0)), (2, PointValue::Exact(1))],
            2,
            &one,
        )
        .unwrap();
        assert_eq!(ord, np(&[(0, 1), (1, 1)]));
        let ss = NewtonPolygon::from_valuations(
            &[(0, PointValue::Exact(0)), (1, PointValue::AtLeast(2)), (2, PointValue::Exact(1))],
            2,
            &one,
        )
        .unwrap();
        assert_eq!(ss, np(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn sentinel_below_hull_is_rejected() {
        let e = NewtonPolygon::from_valuations(
            &[(0, PointValue::Exact(0)), (1, PointValue::AtLeast(1)), (2, PointValue::Exact(4))],
            2,
            &int(1),
        );
        assert!(matches!(e, Err(Error::PrecisionInsufficient(_))));
    }

    #[test]
    fn dominance_examples() {
        let ss = np(&[(1, 2), (1, 2)]);
        let ord = np(&[(0, 1), (1, 1)]);
        assert!(ss.dominates(&ord));
        assert!(!ord.dominates(&ss));
        assert!(ss.dominates(&ss));
        assert!(!np(&[(0, 1)]).dominates(&ord));
    }

    #[test]
    fn exterior_examples() {
        let p = np(&[(0, 1), (0, 1), (1, 1)]);
        let e2 = p.exterior_power(2).unwrap();
        assert_eq!(e2, np(&[(0, 1), (1, 1), (1, 1)]));
        assert_eq!(e2.initial_slope(), Some((int(0), 1)));
        assert_eq!(np(&[(0, 1), (1, 1)]).exterior_power(2).unwrap(), np(&[(1, 1)]));
        let h = np(&[(0, 1), (1, 2), (1, 2)]);
        assert_eq!(h.exterior_power(1).unwrap(), h);
        assert!(h.exterior_power(4).is_err());
    }

    #[test]
    fn sums_and_tensors() {
        assert_eq!(np(&[(0, 1)]).direct_sum(&np(&[(1, 1)])), np(&[(0, 1), (1, 1)]));
        assert_eq!(np(&[(1, 2), (1, 2)]).tensor(&np(&[(1, 1)])), np(&[(3, 2), (3, 2)]));
    }

    #[test]
    fn json_form() {
        let p = np(&[(0, 1), (1, 2), (1, 2)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"vertices":[[0,"0"],[1,"0"],[3,"1"]]}"#);
        assert_eq!(serde_json::from_str::<NewtonPolygon>(&s).unwrap(), p);
        assert!(serde_json::from_str::<NewtonPolygon>(r#"{"vertices":[[0,"0"],[1,"1"],[2,"1"]]}"#).is_err());
    }

    #[test]
    fn svg_mentions_slopes() {
        let p = np(&[(0, 1), (1, 2), (1, 2)]);
        let svg = render_svg(&[("x", &p)]);
        assert!(svg.starts_with("<svg") && svg.contains(">1/2<"));
    }
}
