use np_core::{Matrix, Ring, RingSpec, Val, WittElement};
use proptest::prelude::*;

#[derive(Clone, Debug)]
struct Setup {
    ring: RingSpec,
    raw: Vec<Vec<i64>>,
}

/// A ring W(F_{q^d})/p^M and some raw coordinate vectors in it.
fn setup(count: usize) -> impl Strategy<Value = Setup> {
    prop_oneof![Just((2u64, 1u32, 3u32)), Just((3, 2, 1)), Just((5, 1, 2)), Just((7, 1, 1)), Just((3, 1, 3))]
        .prop_flat_map(move |(p, f, d)| {
            let ring = RingSpec::new(p, f, d, 5).unwrap();
            let n = ring.residue_degree();
            let pm = ring.pm() as i64;
            prop::collection::vec(prop::collection::vec(0..pm, n), count).prop_map(move |raw| Setup { ring: ring.clone(), raw })
        })
}

fn elems(s: &Setup) -> Vec<WittElement> {
    s.raw.iter().map(|c| WittElement::from_coords(&s.ring, c).unwrap()).collect()
}

fn matrix(ring: &RingSpec, n: usize, raw: &[Vec<i64>]) -> Matrix<WittElement> {
    let zero = WittElement::zero(ring);
    Matrix::from_fn(n, n, &zero, |i, j| WittElement::from_coords(ring, &raw[i * n + j]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(s in setup(3)) {
        let e = elems(&s);
        let (a, b, c) = (&e[0], &e[1], &e[2]);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(&(a + b) - b, a.clone());
    }

    #[test]
    fn frobenius_is_a_lift_of_the_q_power(s in setup(2)) {
        let e = elems(&s);
        let (a, b) = (&e[0], &e[1]);
        prop_assert_eq!((a * b).frobenius(), &a.frobenius() * &b.frobenius());
        prop_assert_eq!((a + b).frobenius(), &a.frobenius() + &b.frobenius());
        let q = s.ring.q() as u128;
        prop_assert_eq!(a.frobenius().residue(), a.pow(q).residue());
    }

    #[test]
    fn valuation_is_additive(s in setup(2)) {
        let e = elems(&s);
        let m = s.ring.precision();
        if let (Val::Finite(x), Val::Finite(y)) = (e[0].valuation(), e[1].valuation()) {
            if x + y < m {
                prop_assert_eq!((&e[0] * &e[1]).valuation(), Val::Finite(x + y));
            }
        }
    }

    #[test]
    fn cayley_hamilton(s in setup(36), n in 1usize..=6) {
        let m = matrix(&s.ring, n, &s.raw);
        let cp = m.char_poly();
        prop_assert_eq!(cp.len(), n + 1);
        prop_assert!(m.eval_poly(&cp).is_zero());
    }
}

#[test]
fn unit_inverse_round_trip() {
    let ring = RingSpec::new(3, 2, 1, 6).unwrap();
    let a = WittElement::from_coords(&ring, &[2, 5]).unwrap();
    assert_eq!(&a * &a.unit_inverse().unwrap(), WittElement::one(&ring));
}
