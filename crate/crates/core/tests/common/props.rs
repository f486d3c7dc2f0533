//! Property checks shared by the property suite and the acceptance run.

#![allow(dead_code)]

use ct_forge::contour::{contour_ct_converged, max_points_for, QuadratureConfig};
use ct_forge::exact::{gamma_half, morris_rhs, thm_rhs, HalfInt, Rational};
use ct_forge::identities::{lhs, IdentitySpec};
use ct_forge::poly::{Monomial, Polynomial};
use ct_forge::{CtOrder, FactoredRational, Poly};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 128;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Sparse polynomials in up to four variables, degree <= 3 per variable.
pub fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..=3, 4), -9i64..=9), 0..6).prop_map(|terms| {
        Polynomial::from_terms(terms.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), int(c))))
    })
}

pub fn ring_axioms(p: &Poly, q: &Poly, r: &Poly) -> Result<(), TestCaseError> {
    prop_assert_eq!(&(&(p + q) + r), &(p + &(q + r)));
    prop_assert_eq!(&(p + q), &(q + p));
    prop_assert_eq!(&(&(p * q) * r), &(p * &(q * r)));
    prop_assert_eq!(&(p * q), &(q * p));
    prop_assert_eq!(&(p * &(q + r)), &(&(p * q) + &(p * r)));
    prop_assert_eq!(&(p + &Poly::zero()), p);
    prop_assert_eq!(&(p * &Poly::one()), p);
    let same = p.clone();
    prop_assert!((p - &same).is_zero());
    prop_assert_eq!(&(p + &(-p)), &Poly::zero());
    Ok(())
}

pub fn coeff_reconstruction(p: &Poly, v: usize) -> Result<(), TestCaseError> {
    let mut rebuilt = Poly::zero();
    for k in 0..=p.degree_in(v) {
        let c = p.coeff_of(v, k);
        prop_assert!(!c.contains_var(v));
        rebuilt = &rebuilt + &c.shift_var(v, k);
    }
    prop_assert_eq!(&rebuilt, p);
    Ok(())
}

fn one_minus(v: usize) -> Poly {
    &Poly::one() - &Poly::var(v)
}

/// Affine factors whose poles all lie off the small torus around the origin.
fn factor_pool() -> Vec<Poly> {
    vec![
        Poly::var(0),
        Poly::var(1),
        one_minus(0),
        one_minus(1),
        &Poly::var(1) - &Poly::var(0),
        &one_minus(1) - &Poly::var(0),
    ]
}

/// Two-variable factored rational functions over `factor_pool`.
pub fn factored_strategy() -> impl Strategy<Value = FactoredRational> {
    let numerator = prop::collection::vec((prop::collection::vec(0u32..=2, 2), -5i64..=5), 1..4);
    let exps = prop::collection::vec(0u32..=2, 6);
    (numerator, exps).prop_map(|(terms, exps)| {
        let num = Polynomial::from_terms(terms.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), int(c))));
        let mut f = FactoredRational::new(num);
        for (h, e) in factor_pool().into_iter().zip(exps) {
            f.divide_by(h, e).expect("nonzero factor");
        }
        f
    })
}

pub fn ct_linearity(f: &FactoredRational, g: &FactoredRational, alpha: i64, beta: i64) -> Result<(), TestCaseError> {
    let order = CtOrder::natural(2);
    let combo = f.scale(&int(alpha)).add(&g.scale(&int(beta)));
    prop_assert!(f.add(g).same_function(&g.add(f)));
    let lhs = combo.ct_iterated(&order).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cf = f.ct_iterated(&order).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cg = g.ct_iterated(&order).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(lhs, int(alpha) * cf + int(beta) * cg);
    Ok(())
}

/// Exact engine agrees with the trapezoidal estimate on the same function.
pub fn exact_matches_numeric(f: &FactoredRational) -> Result<(), TestCaseError> {
    let exact = f.ct_iterated(&CtOrder::natural(2)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cfg = QuadratureConfig::default_x(2).with_points(32);
    let est = ct_forge::contour::refine(&cfg, 1e-11, 1024, |c| ct_forge::contour::contour_ct_factored(f, 2, c))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let x = exact_f64(&exact);
    prop_assert!(est.converged, "not converged: {est}");
    prop_assert!((est.re - x).abs() <= 1e-7 * x.abs().max(1.0), "exact {x} vs {est}");
    prop_assert!(est.im.abs() <= 1e-7 * x.abs().max(1.0));
    Ok(())
}

pub fn exact_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Small instances whose oracle is cheap.
pub fn small_spec_strategy() -> impl Strategy<Value = IdentitySpec> {
    prop_oneof![
        (1u64..=2, 1u64..=3, 0u64..=2, 1u64..=2).prop_map(|(n, a, b, t)| IdentitySpec::morris(n, a, b, t)),
        (1u64..=2, 1u64..=3, 1u64..=2).prop_map(|(n, a, t)| IdentitySpec::thm(n, a, t)),
        (1u64..=2).prop_map(IdentitySpec::mm),
        (1u64..=2).prop_map(IdentitySpec::cry),
    ]
}

/// The estimate does not depend on the admissible radius.
pub fn epsilon_independence(spec: &IdentitySpec, scale: f64) -> Result<(), TestCaseError> {
    let n = spec.n;
    let run = |eps: f64| {
        contour_ct_converged(spec, &QuadratureConfig::new(eps, 32), 1e-11, max_points_for(n))
            .map_err(|e| TestCaseError::fail(e.to_string()))
    };
    let base = QuadratureConfig::default_x(n).epsilon;
    let v1 = run(base)?;
    let v2 = run(base * scale)?;
    prop_assert!(v1.converged && v2.converged, "{v1} / {v2}");
    let diff = (v1.value() - v2.value()).norm();
    prop_assert!(diff <= 1e-8 * v1.value().norm().max(1.0), "{v1} vs {v2}");
    let exact = exact_f64(&lhs(spec).map_err(|e| TestCaseError::fail(e.to_string()))?);
    prop_assert!((v2.re - exact).abs() <= 1e-8 * exact.abs().max(1.0));
    Ok(())
}

/// `Gamma(q + 1) = q Gamma(q)` away from the poles.
pub fn gamma_recurrence(twice: i64) -> Result<(), TestCaseError> {
    let q = HalfInt::from_twice(twice);
    prop_assume!(!q.is_nonpositive_integer());
    let lhs = gamma_half(q.add_int(1)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let rhs = gamma_half(q).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(lhs.pi_half_exp, rhs.pi_half_exp);
    prop_assert_eq!(lhs.rational_part, q.to_rational() * rhs.rational_part);
    Ok(())
}

/// Every `sqrt(pi)` cancels in the closed forms.
pub fn pi_cancellation(n: u64, a: u64, b: u64, twoc: u64) -> Result<(), TestCaseError> {
    let m = morris_rhs(n, a, b, twoc);
    prop_assert!(m.is_ok(), "morris {n} {a} {b} {twoc}: {m:?}");
    let t = thm_rhs(n, a, twoc);
    prop_assert!(t.is_ok(), "typed {n} {a} {twoc}: {t:?}");
    prop_assert!(m.unwrap() > Rational::zero());
    prop_assert!(t.unwrap() > Rational::zero());
    Ok(())
}
