use mcshane::cluster::{FlipSeed, TwistState};
use mcshane::exec::Exec;
use mcshane::numerics::{rational, Rational};
use mcshane::torus::{enumerate_curves, logistic_gap, slope_to_word, CurveEngine, CurveSlope, Orientation};
use mcshane::verify::{mcshane_sum, SumMode, VerifyOptions};
use proptest::prelude::*;

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..60, 1i64..20).prop_map(|(p, q)| rational(p, q))
}

fn twist_state() -> impl Strategy<Value = TwistState<Rational>> {
    proptest::array::uniform8(positive_rational())
        .prop_map(|v| TwistState::from_array(v).expect("positive coordinates"))
}

fn flip_seed() -> impl Strategy<Value = FlipSeed<Rational>> {
    proptest::array::uniform8(positive_rational()).prop_map(|v| FlipSeed::from_array(v).expect("positive coordinates"))
}

fn slope() -> impl Strategy<Value = CurveSlope> {
    (0usize..24, any::<bool>()).prop_map(|(k, positive)| {
        let unoriented: Vec<CurveSlope> =
            enumerate_curves(6).into_iter().filter(|s| s.orientation() == Orientation::Positive).collect();
        let s = unoriented[k % unoriented.len()];
        if positive {
            s
        } else {
            s.reversed()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twist_moves_invert_each_other(st in twist_state()) {
        prop_assert_eq!(st.twist_step().inverse_twist_step(), st.clone());
        prop_assert_eq!(st.inverse_twist_step().twist_step(), st);
    }

    #[test]
    fn rotation_has_order_three_and_reversal_order_two(st in twist_state()) {
        prop_assert_eq!(st.rotate().rotate().rotate(), st.clone());
        prop_assert_eq!(st.reverse().reverse(), st);
    }

    #[test]
    fn moves_preserve_positivity(st in twist_state()) {
        let zero = rational(0, 1);
        for moved in [st.twist_step(), st.inverse_twist_step(), st.rotate(), st.reverse()] {
            prop_assert!(moved.coords().iter().all(|x| *x > zero));
        }
    }

    #[test]
    fn potentials_survive_a_flip(seed in flip_seed()) {
        let flipped = seed.flip_relabeled();
        prop_assert_eq!(flipped.potentials(), seed.potentials());
        prop_assert_eq!(flipped.flip_relabeled(), seed);
    }

    #[test]
    fn words_abelianize_to_their_slope(s in slope()) {
        let (p, q) = s.homology();
        prop_assert_eq!(slope_to_word(&s).abelianization(), (p, q));
    }

    #[test]
    fn lengths_are_ordered_and_swap_under_reversal(st in twist_state(), s in slope()) {
        let engine = CurveEngine::new(st, Default::default()).unwrap();
        let fwd = engine.invariants(&s).unwrap();
        let back = engine.invariants(&s.reversed()).unwrap();
        prop_assert!(fwd.l1 > 0.0 && fwd.l2 > 0.0);
        prop_assert!((fwd.l1 - back.l2).abs() <= 1e-8 * fwd.l1.max(1.0));
        prop_assert!((fwd.tau + back.tau).abs() <= 1e-8 * fwd.l1.max(1.0));
        let gap = logistic_gap(fwd.b1_mu);
        prop_assert!(gap > 0.0 && gap < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn partial_sums_increase_below_one_for_any_thread_count(st in twist_state(), threads in 1usize..5) {
        let seq = VerifyOptions { exec: Exec::Sequential, ..Default::default() };
        let par = VerifyOptions { exec: Exec::Parallel { threads }, ..Default::default() };
        let a = mcshane_sum(&st, 4, SumMode::Curve, &seq).unwrap();
        let b = mcshane_sum(&st, 4, SumMode::Curve, &par).unwrap();
        prop_assert_eq!(&a.partial_sums, &b.partial_sums);
        prop_assert!(a.partial_sums.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(a.total < 1.0 + 1e-9);
    }
}
