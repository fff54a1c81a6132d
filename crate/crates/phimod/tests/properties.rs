mod support;

use support::*;

macro_rules! props {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = support::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

props!(
    h_reduction_preserves_series,
    extraction_matches_enumeration,
    phi_reduce_preserves_series,
    power_minus_phi_identity,
    frobenius_sum_identity,
    legendre_formula,
    degree_bound_is_least,
    structured_and_expanded_agree,
    short_monic_polynomials_never_vanish,
);

#[test]
fn every_property_is_listed() {
    assert_eq!(ALL.len(), 9);
    assert!(CASES >= 200);
}
