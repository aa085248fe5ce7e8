use proptest::prelude::*;

use mfact::approx::{bph_bounds, BrieskornPhamSpec};
use mfact::field::Field;
use mfact::semigroup::{colon, parse_t_power, t_power, FractionalIdeal, SemigroupRing};
use mfact::series::{Monomial, Ring, TruncatedSeries};

fn ring() -> Ring {
    Ring::new(&["x", "y"], Field::Prime(101), 8).unwrap()
}

fn series(r: &Ring, terms: &[(u32, u32, i64)]) -> TruncatedSeries {
    TruncatedSeries::from_terms(r, terms.iter().map(|&(a, b, c)| (Monomial(vec![a, b]), r.field.from_i64(c))))
}

fn terms() -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
    prop::collection::vec((0u32..6, 0u32..6, -50i64..50), 0..6)
}

proptest! {
    #[test]
    fn series_ring_axioms(a in terms(), b in terms(), c in terms()) {
        let r = ring();
        let (a, b, c) = (series(&r, &a), series(&r, &b), series(&r, &c));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn units_invert(c0 in 1i64..100, rest in terms()) {
        let r = ring();
        let u = series(&r, &rest).add(&r.int(c0)).unwrap();
        prop_assume!(u.is_unit());
        prop_assert_eq!(u.mul(&u.invert_unit().unwrap()).unwrap(), r.one());
    }

    #[test]
    fn t_powers_round_trip(e in -40i64..40) {
        prop_assert_eq!(parse_t_power(&t_power(e)).unwrap(), e);
    }

    #[test]
    fn colon_matches_brute_force(
        (a, b) in prop::sample::select(vec![(2u32, 3u32), (3, 4), (3, 5), (4, 5), (2, 7)]),
        gi in prop::collection::vec(-4i64..10, 1..4),
        gj in prop::collection::vec(-4i64..10, 1..4),
        m in -15i64..25,
    ) {
        let r = SemigroupRing::new(a, b).unwrap();
        let i = FractionalIdeal::new(&r, &gi).unwrap();
        let j = FractionalIdeal::new(&r, &gj).unwrap();
        let brute = (-10..=80).filter(|&v| i.contains(&r, v)).all(|v| j.contains(&r, v + m));
        prop_assert_eq!(colon(&r, &j, &i).contains(&r, m), brute);
    }

    #[test]
    fn shifted_ideals_are_isomorphic(gi in prop::collection::vec(-4i64..12, 1..4), c in -6i64..6) {
        let r = SemigroupRing::new(3, 4).unwrap();
        let i = FractionalIdeal::new(&r, &gi).unwrap();
        prop_assert!(i.is_isomorphic(&i.shift(c)));
        prop_assert_eq!(i.shift(c).num_gens(), i.num_gens());
    }

    #[test]
    fn bounds_are_ordered(e in prop::collection::vec(2u32..20, 1..8)) {
        let b = bph_bounds(&BrieskornPhamSpec::new(e).unwrap());
        prop_assert!(b.paper <= b.bfk);
        prop_assert_eq!(b.bfk, 2 * b.loewy - 1);
        prop_assert_eq!(b.m, b.paper + 1);
    }
}
