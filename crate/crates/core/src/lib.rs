//! Exact verification of Morris-type constant term identities.
//!
//! * [`exact`]: rationals, half-integer Gamma values, Catalan numbers and the
//!   closed-form right-hand sides.
//! * [`poly`]: sparse multivariate polynomials, generic over the scalar.
//! * [`ct`]: factored rational integrands and iterated constant-term
//!   extraction.
//! * [`identities`]: the CRY, type-D, Morris and type-D-family integrands and
//!   one-call verification.
//! * [`contour`]: the floating-point trapezoidal contour oracle, including the
//!   four-form change-of-variables chain.
//!
//! The algebra is generic over [`Scalar`]; the aliases below fix it to exact
//! rationals, which is what every verification uses.

pub mod contour;
pub mod ct;
pub mod error;
pub mod exact;
pub mod identities;
pub mod poly;
pub mod scalar;

pub use ct::CtOrder;
pub use error::{CtError, Result};
pub use exact::{GammaValue, HalfInt, Rational};
pub use identities::{IdentityFamily, IdentitySpec, PairOrientation, VerificationReport};
pub use scalar::Scalar;

/// Exact polynomial over the rationals.
pub type Poly = poly::Polynomial<Rational>;
/// Exact factored rational integrand.
pub type FactoredRational = ct::Factored<Rational>;
/// Floating-point polynomial.
pub type PolyF64 = poly::Polynomial<f64>;
/// Floating-point factored rational function.
pub type FactoredF64 = ct::Factored<f64>;
