mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn polynomial_ring_axioms(p in poly_strategy(), q in poly_strategy(), r in poly_strategy()) {
        ring_axioms(&p, &q, &r)?;
    }

    #[test]
    fn coefficients_rebuild_polynomial(p in poly_strategy(), v in 0usize..4) {
        coeff_reconstruction(&p, v)?;
    }

    #[test]
    fn polynomial_text_round_trip(p in poly_strategy()) {
        let back: ct_forge::Poly = ct_forge::poly::parse_poly(&p.to_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn constant_term_is_linear(f in factored_strategy(), g in factored_strategy(), alpha in -4i64..=4, beta in -4i64..=4) {
        ct_linearity(&f, &g, alpha, beta)?;
    }

    #[test]
    fn gamma_satisfies_recurrence(twice in -40i64..=60) {
        gamma_recurrence(twice)?;
    }

    #[test]
    fn closed_forms_are_rational(n in 1u64..=6, a in 1u64..=4, b in 0u64..=3, twoc in 1u64..=3) {
        pi_cancellation(n, a, b, twoc)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_engine_matches_quadrature(f in factored_strategy()) {
        exact_matches_numeric(&f)?;
    }

    #[test]
    fn quadrature_is_radius_independent(spec in small_spec_strategy(), scale in 0.6f64..1.6) {
        epsilon_independence(&spec, scale)?;
    }
}
