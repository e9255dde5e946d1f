use np_core::curve::{numerator_from_power_sums, power_sums_from_numerator, CurveKind, CurveModel, CurvePoint};
use proptest::prelude::*;

/// Projective count over a prime field by enumerating all (x, y).
fn naive_count(p: i64, kind: CurveKind, c: &[i64]) -> u64 {
    let md = |v: i64| v.rem_euclid(p);
    let eval = |poly: &[i64], x: i64| poly.iter().rev().fold(0, |acc, &k| md(acc * x + k));
    let mut n = 0u64;
    for x in 0..p {
        for y in 0..p {
            let hit = match kind {
                CurveKind::EllipticWeierstrass => {
                    let [a1, a2, a3, a4, a6] = [c[0], c[1], c[2], c[3], c[4]];
                    md(y * y + a1 * x * y + a3 * y) == eval(&[a6, a4, a2, 1], x)
                }
                CurveKind::Hyperelliptic => md(y * y) == eval(c, x),
                CurveKind::ProjectiveLine => unreachable!(),
            };
            n += hit as u64;
        }
    }
    let infinity = match kind {
        CurveKind::Hyperelliptic if (c.len() - 1) % 2 == 0 => {
            let lc = md(*c.last().unwrap());
            (1..p).filter(|y| md(y * y) == lc).count() as u64
        }
        _ => 1,
    };
    n + infinity
}

#[test]
fn counts_match_pair_enumeration() {
    for (p, a) in [(7, [0, 0, 0, 1, 0]), (7, [0, 0, 0, 1, 1]), (5, [0, 0, 0, 0, 1]), (11, [1, 0, 1, 3, 4])] {
        let c = CurveModel::elliptic(p as u64, a).unwrap();
        assert_eq!(c.count_points(1).unwrap(), naive_count(p, CurveKind::EllipticWeierstrass, &a));
    }
    for (p, f) in [(7, vec![1, 2, 0, 3, 0, 1]), (5, vec![2, 0, 0, 0, 0, 0, 1]), (7, vec![3, 1, 0, 0, 5])] {
        let c = CurveModel::hyperelliptic(p as u64, &f).unwrap();
        assert_eq!(c.count_points(1).unwrap(), naive_count(p, CurveKind::Hyperelliptic, &f));
    }
}

#[test]
fn ordinary_curve_over_f7() {
    let c = CurveModel::elliptic(7, [0, 0, 0, 1, 1]).unwrap();
    let n1 = naive_count(7, CurveKind::EllipticWeierstrass, &[0, 0, 0, 1, 1]) as i64;
    let a = 7 + 1 - n1;
    let z = c.zeta().unwrap();
    assert_eq!(z.numerator, vec![1, -a, 7]);
    assert_eq!(z.p_rank, 1);
}

#[test]
fn second_count_follows_from_the_trace() {
    for a in [[0, 0, 0, 1, 1], [1, 1, 0, 2, 1], [0, 2, 0, 0, 1]] {
        let c = CurveModel::elliptic(5, a).unwrap();
        let q = 5i64;
        let trace = q + 1 - c.count_points(1).unwrap() as i64;
        // α^2 + β^2 = a^2 - 2q
        assert_eq!(c.count_points(2).unwrap() as i64, q * q + 1 - (trace * trace - 2 * q));
    }
}

#[test]
fn supersingular_has_p_rank_zero() {
    for (q, a) in [(7, [0, 0, 0, 1, 0]), (5, [0, 0, 0, 0, 1]), (11, [0, 0, 0, 0, 1])] {
        let z = CurveModel::elliptic(q, a).unwrap().zeta().unwrap();
        assert_eq!(z.numerator[1] % q as i64, 0);
        assert_eq!(z.p_rank, 0);
    }
}

#[test]
fn genus_two_zeta_predicts_higher_counts() {
    let c = CurveModel::hyperelliptic(7, &[1, 2, 0, 3, 0, 1]).unwrap();
    let z = c.zeta().unwrap();
    assert_eq!(z.genus, 2);
    assert_eq!(z.numerator.len(), 5);
    assert_eq!(z.numerator[4], 49);
    assert_eq!(z.count(5), c.count_points(5).unwrap() as i128);
}

#[test]
fn p_rank_is_stable_under_cubic_extension() {
    for a in [[0, 0, 0, 1, 1], [0, 0, 0, 1, 0]] {
        let e = CurveModel::elliptic(5, a).unwrap().zeta().unwrap().p_rank;
        let big = CurveModel::elliptic(125, a).unwrap().zeta().unwrap().p_rank;
        assert_eq!(e, big);
    }
}

#[test]
fn elliptic_partition_over_f5() {
    let c = CurveModel::elliptic(5, [0, 0, 0, 1, 1]).unwrap();
    let pts = c.closed_points(3).unwrap();
    for m in 1..=3u32 {
        let total: u64 = pts.iter().filter(|x| m % x.degree == 0).map(|x| x.degree as u64).sum();
        assert_eq!(total, c.count_points(m).unwrap());
    }
    assert_eq!(pts.iter().filter(|x| x.degree == 1).count() as u64, c.count_points(1).unwrap());
}

#[test]
fn two_preimages_split_by_coset() {
    // x^3 + x = x(x^2 + 1) splits over F_49, so E[2] is rational there
    let c = CurveModel::elliptic(7, [0, 0, 0, 1, 0]).unwrap();
    let e = c.group(2).unwrap();
    let mut total = 0;
    for p in e.points() {
        let k = c.mult_n_preimages(2, &p, 2).unwrap();
        assert!(k == 0 || k == 4, "{k}");
        total += k;
    }
    assert_eq!(total, c.count_points(2).unwrap());
    assert_eq!(c.mult_n_preimages(1, &CurvePoint::Infinity, 1).unwrap(), 1);
    assert!(c.mult_n_preimages(7, &CurvePoint::Infinity, 1).is_err());
}

#[test]
fn curve_toml_round_trip() {
    let src = "kind = \"hyperelliptic\"\nq = 7\ncoefficients = [1, 2, 0, 3, 0, 1]\n";
    let repr: np_core::curve::CurveRepr = toml::from_str(src).unwrap();
    let c = CurveModel::from_repr(&repr).unwrap();
    assert_eq!(c.genus(), 2);
    let back = CurveModel::from_repr(&toml::from_str(&toml::to_string(&c.to_repr()).unwrap()).unwrap()).unwrap();
    assert_eq!(back, c);
}

fn nonsingular(p: u64) -> impl Strategy<Value = CurveModel> {
    prop::array::uniform5(0..p as i64).prop_filter_map("singular", move |a| CurveModel::elliptic(p, a).ok())
}

fn genus_two(p: u64) -> impl Strategy<Value = CurveModel> {
    prop::collection::vec(0..p as i64, 5)
        .prop_filter_map("not squarefree", move |mut f| {
            f.push(1);
            CurveModel::hyperelliptic(p, &f).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hasse_weil_and_round_trip(c in prop_oneof![nonsingular(5), nonsingular(7), genus_two(5)]) {
        let z = c.zeta().unwrap();
        let q = c.q() as i128;
        for (m, &n) in z.counts.iter().enumerate() {
            let qm = q.pow(m as u32 + 1);
            let dev = n as i128 - qm - 1;
            prop_assert!(dev * dev <= 4 * (z.genus as i128).pow(2) * qm);
        }
        let sums: Vec<i128> = z.counts.iter().enumerate().map(|(m, &n)| q.pow(m as u32 + 1) + 1 - n as i128).collect();
        prop_assert_eq!(power_sums_from_numerator(&z.numerator, sums.len()), sums.clone());
        prop_assert_eq!(numerator_from_power_sums(&sums).unwrap(), z.numerator.clone());
        prop_assert!(z.p_rank <= z.genus);
    }

    #[test]
    fn closed_point_partition(c in prop_oneof![nonsingular(5), nonsingular(3), genus_two(3)]) {
        prop_assert!(c.partition_check(3).unwrap());
    }
}
