mod common;

use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(CASES) })]

    #[test]
    fn truncated_series_form_a_ring(s in series_triple()) {
        ring_axioms(s)?;
    }

    #[test]
    fn reversion_inverts_composition(f in invertible_series()) {
        reversion_round_trip(f)?;
    }

    #[test]
    fn puiseux_quotient_leading_term(p in puiseux_pair()) {
        puiseux_division_law(p)?;
    }
}
