use np_core::polygon::{int, rat, NewtonPolygon, PointValue, Q};
use proptest::prelude::*;

fn slopes(rank: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), rank).prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

/// Random polygon of the given rank and height 0: slopes shifted so they sum to zero.
fn balanced(rank: usize) -> impl Strategy<Value = NewtonPolygon> {
    slopes(rank).prop_map(move |s| {
        let mean: Q = s.iter().sum::<Q>() / int(rank as i64);
        NewtonPolygon::from_slopes(&s.iter().map(|x| x - &mean).collect::<Vec<_>>())
    })
}

/// All slope multisets of rank n with slopes m/d, d <= 4, in a small window.
fn exhaustive(n: usize) -> Vec<Vec<Q>> {
    let mut pool: Vec<Q> = Vec::new();
    for d in 1..=4 {
        for m in 0..=d {
            let s = rat(m, d);
            if !pool.contains(&s) {
                pool.push(s);
            }
        }
    }
    pool.sort();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(pool: &[Q], from: usize, n: usize, cur: &mut Vec<Q>, out: &mut Vec<Vec<Q>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i].clone());
            rec(pool, i, n, cur, out);
            cur.pop();
        }
    }
    rec(&pool, 0, n, &mut cur, &mut out);
    out
}

/// Initial slope and its multiplicity in the k-th exterior power by enumerating index subsets.
fn subset_oracle(s: &[Q], k: usize) -> (Q, usize) {
    let n = s.len();
    let mut best: Option<(Q, usize)> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let sum: Q = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s[i].clone()).sum();
        best = match best {
            Some((b, c)) if b == sum => Some((b, c + 1)),
            Some((b, c)) if b < sum => Some((b, c)),
            _ => Some((sum, 1)),
        };
    }
    best.unwrap()
}

#[test]
fn exterior_lemma_exhaustive_small() {
    // rank <= 4 here; the acceptance run covers rank 6
    for n in 1..=4 {
        for s in exhaustive(n) {
            let np = NewtonPolygon::from_slopes(&s);
            let mut k = 0;
            let groups = np.slopes();
            for (_, m) in &groups[..groups.len() - 1] {
                k += m;
                let ext = np.exterior_power(k).unwrap();
                assert_eq!(ext.initial_slope().unwrap(), subset_oracle(&s, k));
                assert_eq!(ext.initial_slope().unwrap().1, 1, "{np} at k = {k}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dominance_is_a_partial_order(a in balanced(4), b in balanced(4), c in balanced(4)) {
        prop_assert!(a.dominates(&a));
        if a.dominates(&b) && b.dominates(&a) {
            prop_assert_eq!(&a, &b);
        }
        if a.dominates(&b) && b.dominates(&c) {
            prop_assert!(a.dominates(&c));
        }
        // the hull is dominated by both inputs
        let h = NewtonPolygon::hull_of(&[a.clone(), b.clone()]);
        prop_assert!(a.dominates(&h) && b.dominates(&h));
    }

    #[test]
    fn top_exterior_power_is_a_point(s in slopes(5)) {
        let np = NewtonPolygon::from_slopes(&s);
        let top = np.exterior_power(5).unwrap();
        prop_assert_eq!(top.rank(), 1);
        prop_assert_eq!(top.height(), np.height());
    }

    #[test]
    fn exterior_matches_subset_sums(s in slopes(5), k in 1usize..=5) {
        let np = NewtonPolygon::from_slopes(&s);
        let mut sums = Vec::new();
        for mask in 0u32..32 {
            if mask.count_ones() as usize == k {
                sums.push((0..5).filter(|i| mask >> i & 1 == 1).map(|i| s[i].clone()).sum::<Q>());
            }
        }
        prop_assert_eq!(np.exterior_power(k).unwrap(), NewtonPolygon::from_slopes(&sums));
    }

    #[test]
    fn points_above_the_hull_do_not_matter(val in prop::collection::vec(0i64..8, 6), bump in prop::collection::vec(1i64..5, 6)) {
        let pts: Vec<(usize, PointValue)> =
            val.iter().enumerate().map(|(i, &v)| (i, PointValue::Exact(if i == 0 { 0 } else { v }))).collect();
        let base = NewtonPolygon::from_valuations(&pts, 5, &int(1)).unwrap();
        let mut more = pts.clone();
        for (i, b) in bump.iter().enumerate() {
            let above = base.value_at(i) + int(*b);
            let above = above.ceil().to_integer().try_into().unwrap();
            more.push((i, PointValue::Exact(above)));
        }
        prop_assert_eq!(NewtonPolygon::from_valuations(&more, 5, &int(1)).unwrap(), base);
    }
}
