use std::collections::BTreeMap;

use num_bigint::BigInt;
use np_core::curve::{Coef, CurveKind};
use np_core::family::{FactorCoef, SyntheticTable};
use np_core::lfunction::{bound, check_bound, congruence_check, degree_identity_check, l_series, normalize_unit_character};
use np_core::{CrystalFamily, CurveModel, Gf};
use proptest::prelude::*;

fn coefs(v: &[i64]) -> Vec<FactorCoef> {
    v.iter().map(|&c| FactorCoef::Known(BigInt::from(c))).collect()
}

fn synthetic(base: CurveModel, rank: usize, default: &[i64], entries: &[(&str, &[i64])]) -> CrystalFamily {
    let entries: BTreeMap<String, Vec<FactorCoef>> = entries.iter().map(|(k, v)| (k.to_string(), coefs(v))).collect();
    let table = SyntheticTable { rank, precision: None, default: Some(coefs(default)), entries };
    CrystalFamily::synthetic(base, table).unwrap()
}

/// Plain i128 power series mod m.
fn inv_series(f: &[i128], n: usize, m: i128) -> Vec<i128> {
    let mut b = vec![0i128; n];
    b[0] = 1;
    for k in 1..n {
        let mut acc = 0;
        for j in 1..=k.min(f.len() - 1) {
            acc += f[j] * b[k - j];
        }
        b[k] = (-acc).rem_euclid(m);
    }
    b
}

fn mul_series(a: &[i128], b: &[i128], m: i128) -> Vec<i128> {
    let n = a.len();
    let mut c = vec![0i128; n];
    for i in 0..n {
        for j in 0..n - i {
            c[i + j] = (c[i + j] + a[i] * b[j]).rem_euclid(m);
        }
    }
    c
}

#[test]
fn legendre_series_matches_fiberwise_product() {
    let (p, order, m) = (7u64, 4usize, 3u32);
    let modulus = (p as i128).pow(m);
    let fam = CrystalFamily::legendre(p).unwrap();
    let got = l_series(&fam, order, m).unwrap();

    let mut want = vec![0i128; order];
    want[0] = 1;
    for x in fam.base().closed_points(order as u32 - 1).unwrap() {
        let Some(ix) = x.x else { continue };
        let qd = p.pow(x.degree);
        let gf = Gf::get(p as u32, x.degree);
        let lam: Vec<i64> = gf.coords_of_index(ix).into_iter().map(i64::from).collect();
        let mut a2: Vec<i64> = lam.iter().map(|c| -c).collect();
        a2[0] -= 1;
        let fiber = [Coef::Int(0), Coef::Coords(a2), Coef::Int(0), Coef::Coords(lam), Coef::Int(0)];
        // λ = 0, 1 give singular cubics
        let Ok(c) = CurveModel::new(CurveKind::EllipticWeierstrass, qd, &fiber) else { continue };
        let a = qd as i128 + 1 - c.count_points(1).unwrap() as i128;
        let d = x.degree as usize;
        let mut f = vec![0i128; order];
        f[0] = 1;
        if d < order {
            f[d] = -a;
        }
        if 2 * d < order {
            f[2 * d] = qd as i128;
        }
        want = mul_series(&want, &inv_series(&f, order, modulus), modulus);
    }
    let got: Vec<i128> = got.coeffs().iter().map(|c| c.try_into().unwrap()).collect();
    assert_eq!(got, want);
}

#[test]
fn truncation_is_exact() {
    let fam = CrystalFamily::legendre(5).unwrap();
    let short = l_series(&fam, 3, 4).unwrap();
    let long = l_series(&fam, 5, 4).unwrap();
    assert_eq!(short, long.truncate(3));
}

#[test]
fn direct_sum_multiplies_series() {
    let base = CurveModel::elliptic(5, [0, 0, 0, 1, 1]).unwrap();
    let a = synthetic(base.clone(), 1, &[1, -2], &[("1:inf", &[1, -3])]);
    let b = synthetic(base, 2, &[1, -1, 5], &[]);
    let sum = a.direct_sum(&b).unwrap();
    let (order, m) = (5, 4);
    let lhs = l_series(&sum, order, m).unwrap();
    let rhs = l_series(&a, order, m).unwrap().mul(&l_series(&b, order, m).unwrap());
    assert_eq!(lhs, rhs);
}

#[test]
fn legendre_normalizes_on_base_field_points() {
    let fam = CrystalFamily::legendre(7).unwrap();
    let n = normalize_unit_character(&fam, 1, Some(3)).unwrap();
    assert_eq!(n.exponent, 6);
    assert!(n.trivial);
    assert_eq!(n.residues.len(), 2);
    assert_eq!(n.family.rank(), 64);
}

#[test]
fn order_three_residue_becomes_one() {
    // 2 has order 3 modulo 7
    let fam = synthetic(CurveModel::projective_line(7).unwrap(), 2, &[1, -2, 7], &[]);
    let n = normalize_unit_character(&fam, 1, Some(2)).unwrap();
    assert!(n.residues.iter().all(|r| r.u == 2 && r.order == 3 && r.u_normalized == 1));
    assert!(n.trivial);
}

#[test]
fn normalization_rejects_wrong_initial_slope() {
    let fam = synthetic(CurveModel::projective_line(5).unwrap(), 2, &[1, -2, 1], &[]);
    let err = normalize_unit_character(&fam, 1, None).unwrap_err();
    assert_eq!(err.kind(), "slope-hypothesis-violated");
}

#[test]
fn trivial_family_congruence_on_the_line() {
    let fam = synthetic(CurveModel::projective_line(5).unwrap(), 1, &[1, -1], &[]);
    let rep = congruence_check(&fam, 6, None).unwrap();
    assert!(rep.holds(), "{:?}", rep.mismatch);
    // 1/((1 - t)(1 - 5t)) ≡ 1/(1 - t)
    assert_eq!(rep.lhs, vec![1; 6]);
    assert_eq!(rep.projective_rhs.as_deref(), Some(&[1u64; 6][..]));
}

#[test]
fn legendre_tensor_power_congruence_small_window() {
    let fam = CrystalFamily::legendre(7).unwrap();
    let n = normalize_unit_character(&fam, 3, Some(3)).unwrap();
    let rep = congruence_check(&n.family, 4, Some(&fam)).unwrap();
    assert!(rep.holds(), "{:?}", rep.mismatch);
    assert!(rep.projective_rhs.is_none());
}

#[test]
fn planted_residue_breaks_the_congruence() {
    let fam = synthetic(CurveModel::projective_line(7).unwrap(), 1, &[1, -1], &[("1:3", &[1, -3])]);
    let rep = congruence_check(&fam, 3, None).unwrap();
    let m = rep.mismatch.expect("planted residue must be caught");
    assert_eq!((m.k, m.lhs, m.rhs), (1, 3, 1));
}

#[test]
fn planted_jump_set_adds_its_degree() {
    let base = CurveModel::elliptic(7, [0, 0, 0, 1, 1]).unwrap();
    let deg2 = base.closed_points(2).unwrap().into_iter().find(|x| x.degree == 2).unwrap();
    // slopes {0, 1} generically, {1/2, 1/2} at the planted point
    let fam = synthetic(base, 2, &[1, -8, 7], &[(deg2.id.as_str(), &[1, 0, 49])]);
    let rep = degree_identity_check(&fam, 8).unwrap();
    assert_eq!((rep.p_rank, rep.jump_degree, rep.observed), (1, 2, Some(3)));
    assert!(rep.holds);
    assert!(congruence_check(&fam, 8, None).unwrap().holds());
}

#[test]
fn open_base_is_rejected_by_degree_identity() {
    let fam = CrystalFamily::legendre(5).unwrap();
    assert_eq!(degree_identity_check(&fam, 4).unwrap_err().kind(), "config-invalid");
}

#[test]
fn legendre_bound_verdict() {
    let rep = check_bound(&CrystalFamily::legendre(7).unwrap(), 2).unwrap();
    assert_eq!(rep.observed, Some(3));
    assert_eq!(rep.verdict, Some(true));
    assert_eq!((rep.g, rep.r), (0, 2));
}

#[test]
fn genus_one_base_satisfies_euler_poincare() {
    let base = CurveModel::elliptic(7, [0, 0, 0, 1, 1]).unwrap();
    let rep = check_bound(&synthetic(base, 1, &[1, -1], &[]), 3).unwrap();
    assert_eq!(rep.bound, BigInt::from(1));
    assert_eq!(rep.euler_poincare, Some((1, 1, true)));
}

fn small_series(p: u64) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1..p as i64, 0..50i64), (p + 1) as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bound_is_monotone(q in 2u64..12, g in 1u32..6, r in 1u64..6) {
        let b = |q, g, r| bound(q, g, r).bound;
        prop_assert!(b(q + 1, g, r) >= b(q, g, r));
        prop_assert!(b(q, g + 1, r) >= b(q, g, r));
        prop_assert!(b(q, g, r + 1) >= b(q, g, r));
    }

    #[test]
    fn reduction_sees_only_unit_residues(uv in small_series(5), shift in prop::collection::vec(1..40i64, 6)) {
        // (1 - u t)(1 - 5 v t) at every rational point; moving v p-adically is invisible mod 5
        let base = CurveModel::projective_line(5).unwrap();
        let ids: Vec<String> = base.closed_points(1).unwrap().into_iter().map(|x| x.id).collect();
        let factor = |u: i64, v: i64| [1, -(u + 5 * v), 5 * u * v];
        let build = |shifted: bool| {
            let rows: Vec<(String, [i64; 3])> = ids
                .iter()
                .zip(&uv)
                .zip(&shift)
                .map(|((id, &(u, v)), &s)| (id.clone(), factor(u, if shifted { v + s } else { v })))
                .collect();
            let entries: Vec<(&str, &[i64])> = rows.iter().map(|(k, v)| (k.as_str(), &v[..])).collect();
            synthetic(base.clone(), 2, &[1, -1, 5], &entries)
        };
        let a = l_series(&build(false), 4, 3).unwrap();
        let b = l_series(&build(true), 4, 3).unwrap();
        prop_assert_eq!(a.mod_p(), b.mod_p());
    }
}
