mod common;

use common::props::*;
use proptest::prelude::*;
use torickit::gitdata::{example, GITData, EXAMPLE_NAMES};
use torickit::localization::EquivClass;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn smith_normal_form_identity(m in int_matrix()) {
        check_smith(&m)?;
    }

    #[test]
    fn window_reindexing(w in -20i64..20, k in -5i64..5, eta in 0i64..7) {
        check_window_reindexing(w, k, eta)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn anticones_closed_under_enlargement(d in git_data(2, 8)) {
        check_anticone_closure(&d)?;
    }

    #[test]
    fn chi_constant_on_chambers(
        (d, shift, e) in git_data(2, 5).prop_flat_map(|d| {
            let (r, m) = (d.r(), d.m());
            (Just(d), prop::collection::vec(-3i64..=3, r), line_classes(r, m))
        })
    ) {
        check_chamber_invariance(&d, &shift, &e)?;
    }

    #[test]
    fn restriction_is_multiplicative(
        (d, a, b) in git_data(2, 5).prop_flat_map(|d| {
            let (r, m) = (d.r(), d.m());
            (Just(d), line_classes(r, m), line_classes(r, m))
        })
    ) {
        check_restrict_multiplicative(&d, &a, &b)?;
    }

    #[test]
    fn class_json_round_trip(e in line_classes(2, 4)) {
        prop_assert_eq!(EquivClass::from_json(&e.to_json()).unwrap(), e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn crepant_iff_equal_eta(w in rank_one_crossing_weights()) {
        check_crepant_iff_eta(&w)?;
    }

    #[test]
    fn crepant_iff_equal_eta_rank_two(d in git_data(2, 5), other in prop::collection::vec(-4i64..=4, 2)) {
        prop_assume!(d.r() == 2);
        check_crepant_iff_eta_rank_two(&d, &other)?;
    }
}

#[test]
fn examples_round_trip_through_json() {
    for name in EXAMPLE_NAMES {
        let d = example(name).unwrap().data;
        assert_eq!(GITData::from_json(&d.to_json()).unwrap(), d, "{name}");
    }
}
