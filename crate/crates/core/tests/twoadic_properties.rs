use chatelet::twoadic::{classify_d, in_ttot1, in_ttot2, odd_pair_condition, TwoAdicClass, TwoAdicTuple};
use proptest::prelude::*;

fn tuple() -> impl Strategy<Value = TwoAdicTuple> {
    let c = || (-2000i64..=2000).prop_filter("nonzero", |x| *x != 0);
    (c(), c(), c(), c()).prop_filter_map("valid tuple", |(a, b, c, d)| TwoAdicTuple::new(a, b, c, d).ok())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20_000, max_local_rejects: 1 << 22, ..ProptestConfig::default() })]

    #[test]
    fn single_pair_implies_product(t in tuple()) {
        prop_assert!(!in_ttot1(&t) || in_ttot2(&t));
    }

    #[test]
    fn product_condition_is_negation_invariant(t in tuple()) {
        let n = TwoAdicTuple::new(-t.a, -(t.b() as i64), -(t.c() as i64), -(t.d() as i64)).unwrap();
        prop_assert_eq!(in_ttot2(&t), in_ttot2(&n));
    }
}

#[test]
fn odd_pair_table_matches_brute_force() {
    for r in (-25i64..=25).step_by(2) {
        for s in (-25i64..=25).step_by(2) {
            for target in [TwoAdicClass::D, TwoAdicClass::Dbar] {
                let mut found = false;
                for u in (1i64..64).step_by(2) {
                    for v in (1i64..64).step_by(2) {
                        let x = (r * u * u + s * v * v) as i128;
                        if x != 0 && classify_d(x).unwrap() == target {
                            found = true;
                        }
                    }
                }
                assert_eq!(odd_pair_condition(r, s, target).unwrap(), found, "r={r} s={s} {target:?}");
            }
        }
    }
}
