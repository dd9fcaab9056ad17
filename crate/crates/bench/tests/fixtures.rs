use nfst_bench::{informant, lookahead, parity, random_machines};
use nfst_core::ambiguity_witness;
use nfst_core::oracle::check_functional_up_to;

#[test]
fn fixed_targets_are_functional_and_unambiguous() {
    for t in [parity(), lookahead()] {
        assert!(ambiguity_witness(&t).is_none());
        assert!(check_functional_up_to(&t, 8).verdict);
        assert!(!informant(&t, 3).is_empty());
    }
}

#[test]
fn random_fixtures_are_reproducible() {
    assert_eq!(random_machines(5, 6), random_machines(5, 6));
}
