//! Property tests for the combinatorial layers.

use proptest::prelude::*;

use stratlab_core::finalseq::FinalSequence;
use stratlab_core::modp::minimal_module;
use stratlab_core::polygons::enumerate_symmetric_polygons;
use stratlab_core::rat::rat;
use stratlab_core::weyl::{enumerate_w, enumerate_wq, CosetRep, Permutation};

fn arb_permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

proptest! {
    #[test]
    fn cycle_string_round_trips(w in arb_permutation(9)) {
        let s = w.cycle_string();
        let back = Permutation::from_cycles(&s, 9).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn inverse_is_involutive_and_length_preserving(w in arb_permutation(8)) {
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert_eq!(w.inverse().length(), w.length());
    }

    #[test]
    fn coset_rep_length_equals_dimension(
        (q, bits) in (1usize..=8).prop_flat_map(|q| (Just(q), prop::collection::vec(any::<bool>(), q)))
    ) {
        let u: Vec<usize> = (1..=q).zip(&bits).filter(|(_, &b)| b).map(|(v, _)| v).collect();
        let b = u.len();
        let rep = CosetRep::new(q - b, b, u).unwrap();
        prop_assert_eq!(rep.dimension(), rep.permutation().length());
    }

    #[test]
    fn symmetric_polygons_have_symmetric_slope_multisets(
        (q, idx) in (1usize..=6).prop_flat_map(|q| {
            let count = enumerate_symmetric_polygons(q).len();
            (Just(q), 0..count)
        })
    ) {
        let p = enumerate_symmetric_polygons(q)[idx].clone();
        let ms = p.slope_multiset();
        prop_assert!(ms.is_symmetric());
        ms.validate_for(q).unwrap();
        prop_assert!(p.first_slope() <= rat(1, 2));
    }

    #[test]
    fn final_sequences_from_wq_are_valid_and_bounded(
        (q, idx) in (2usize..=5).prop_flat_map(|q| (Just(q), 0..(1usize << q)))
    ) {
        let w = enumerate_wq(q)[idx].clone();
        let f = FinalSequence::from_permutation(&w, q).unwrap();
        let increments: usize = (1..=2 * q).map(|i| f.phi(i) - f.phi(i - 1)).sum();
        prop_assert_eq!(increments, q);
        let lambda = f.generic_first_slope();
        prop_assert!(lambda >= rat(0, 1) && lambda <= rat(1, 2));
    }

    #[test]
    fn minimal_module_json_round_trips(
        (q, idx) in (1usize..=4).prop_flat_map(|q| {
            let count = enumerate_symmetric_polygons(q).len();
            (Just(q), 0..count)
        })
    ) {
        let poly = enumerate_symmetric_polygons(q)[idx].clone();
        let m = minimal_module(&poly, 3).unwrap();
        let back = stratlab_core::modp::ModPModule::from_json_value(&m.to_json_value()).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn every_w_32_rep_round_trips_through_its_permutation_label() {
    for rep in enumerate_w(3, 2) {
        let w = rep.permutation();
        let parsed = Permutation::from_cycles(&w.cycle_string(), 5).unwrap();
        assert_eq!(parsed, w);
    }
}
