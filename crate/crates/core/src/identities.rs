//! Catalog of the constant-term identities: integrands, closed forms and a
//! one-call exact verification.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::ct::{CtOrder, Factored};
use crate::error::{CtError, Result};
use crate::exact::{self, gamma_half, GammaValue, HalfInt, Rational};
use crate::poly::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IdentityFamily {
    /// Chan-Robbins-Yuen: `prod (1-x_j)^-2 prod_{j<k} (x_k-x_j)^-1`.
    Cry,
    /// Type-D analog: adds `x_j^-1` and `(1-x_k-x_j)^-1`.
    Mm,
    /// Morris: `prod (1-x_i)^-a x_i^-b prod_{i<j} (x_j-x_i)^-2c`.
    Morris,
    /// Type-D family in `a` and `c`.
    Thm,
}

impl fmt::Display for IdentityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityFamily::Cry => "CRY",
            IdentityFamily::Mm => "MM",
            IdentityFamily::Morris => "MORRIS",
            IdentityFamily::Thm => "THM",
        })
    }
}

impl FromStr for IdentityFamily {
    type Err = CtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cry" => Ok(IdentityFamily::Cry),
            "mm" => Ok(IdentityFamily::Mm),
            "morris" => Ok(IdentityFamily::Morris),
            "thm" => Ok(IdentityFamily::Thm),
            other => Err(CtError::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// Orientation of the Vandermonde-type pair factor in the type-D family.
///
/// `KMinusJ` builds `(x_k - x_j)^{-2c}` for `j < k`, which is the
/// orientation under which the closed form holds; `JMinusK` differs by
/// `(-1)^{2c binom(n,2)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairOrientation {
    #[default]
    #[serde(rename = "kj")]
    KMinusJ,
    #[serde(rename = "jk")]
    JMinusK,
}

impl FromStr for PairOrientation {
    type Err = CtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kj" => Ok(PairOrientation::KMinusJ),
            "jk" => Ok(PairOrientation::JMinusK),
            other => Err(CtError::Parse(format!("unknown orientation `{other}` (expected kj or jk)"))),
        }
    }
}

fn is_default_orientation(o: &PairOrientation) -> bool {
    *o == PairOrientation::KMinusJ
}

/// One identity instance. `twoc` is `2c`, so half-integer `c` stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub family: IdentityFamily,
    pub n: u64,
    #[serde(default)]
    pub a: u64,
    #[serde(default)]
    pub b: u64,
    #[serde(default = "default_twoc")]
    pub twoc: u64,
    #[serde(default, skip_serializing_if = "is_default_orientation")]
    pub orientation: PairOrientation,
}

fn default_twoc() -> u64 {
    1
}

impl IdentitySpec {
    pub fn cry(n: u64) -> Self {
        Self::raw(IdentityFamily::Cry, n, 2, 0, 1)
    }

    pub fn mm(n: u64) -> Self {
        Self::raw(IdentityFamily::Mm, n, 2, 0, 1)
    }

    pub fn morris(n: u64, a: u64, b: u64, twoc: u64) -> Self {
        Self::raw(IdentityFamily::Morris, n, a, b, twoc)
    }

    pub fn thm(n: u64, a: u64, twoc: u64) -> Self {
        Self::raw(IdentityFamily::Thm, n, a, 0, twoc)
    }

    fn raw(family: IdentityFamily, n: u64, a: u64, b: u64, twoc: u64) -> Self {
        IdentitySpec { family, n, a, b, twoc, orientation: PairOrientation::KMinusJ }
    }

    pub fn with_orientation(mut self, orientation: PairOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Pins the parameters a family does not use to its specialization
    /// values and checks the rest.
    pub fn normalized(mut self) -> Result<Self> {
        if self.n < 1 {
            return Err(CtError::Domain("n must be at least 1".into()));
        }
        match self.family {
            IdentityFamily::Cry | IdentityFamily::Mm => {
                self.a = 2;
                self.b = 0;
                self.twoc = 1;
            }
            IdentityFamily::Morris => {}
            IdentityFamily::Thm => self.b = 0,
        }
        if self.twoc < 1 {
            return Err(CtError::Domain("twoc must be a positive integer".into()));
        }
        if self.family != IdentityFamily::Thm {
            self.orientation = PairOrientation::KMinusJ;
        }
        Ok(self)
    }

    /// Half-integer `c`.
    pub fn c(&self) -> HalfInt {
        HalfInt::from_twice(self.twoc as i64)
    }
}

impl fmt::Display for IdentitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            IdentityFamily::Cry | IdentityFamily::Mm => write!(f, "{}(n={})", self.family, self.n),
            IdentityFamily::Morris => {
                write!(f, "MORRIS(n={}, a={}, b={}, c={})", self.n, self.a, self.b, self.c())
            }
            IdentityFamily::Thm => {
                write!(f, "THM(n={}, a={}, c={}", self.n, self.a, self.c())?;
                if self.orientation == PairOrientation::JMinusK {
                    write!(f, ", orientation=jk")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
fn poly(src: &str) -> Polynomial<Rational> {
    crate::poly::parse_poly(src).expect("catalog polynomial")
}

fn one_minus(j: usize) -> Polynomial<Rational> {
    &Polynomial::one() - &Polynomial::var(j)
}

/// The integrand of the instance, with numerator and explicit denominator
/// factors. Variables are `x1..xn`, indexed `0..n`.
pub fn build_integrand(spec: &IdentitySpec) -> Result<Factored<Rational>> {
    let spec = spec.normalized()?;
    let n = spec.n as usize;
    let mut f = Factored::new(Polynomial::one());
    let x = Polynomial::<Rational>::var;
    let diff = |k: usize, j: usize| &x(k) - &x(j);
    let twoc = spec.twoc as u32;
    let a = spec.a as u32;
    match spec.family {
        IdentityFamily::Cry => {
            for j in 0..n {
                f.divide_by(one_minus(j), 2)?;
            }
            for j in 0..n {
                for k in j + 1..n {
                    f.divide_by(diff(k, j), 1)?;
                }
            }
        }
        IdentityFamily::Mm => {
            for j in 0..n {
                f.divide_by(x(j), 1)?;
                f.divide_by(one_minus(j), 2)?;
            }
            for j in 0..n {
                for k in j + 1..n {
                    f.divide_by(diff(k, j), 1)?;
                    f.divide_by(&one_minus(k) - &x(j), 1)?;
                }
            }
        }
        IdentityFamily::Morris => {
            for i in 0..n {
                f.divide_by(one_minus(i), a)?;
                f.divide_by(x(i), spec.b as u32)?;
            }
            for i in 0..n {
                for j in i + 1..n {
                    f.divide_by(diff(j, i), twoc)?;
                }
            }
        }
        IdentityFamily::Thm => {
            // x_j^{1-a}: a zero or positive power goes to the numerator
            if a == 0 {
                f = Factored::new((0..n).fold(Polynomial::one(), |acc, j| &acc * &x(j)));
            }
            for j in 0..n {
                f.divide_by(x(j), a.saturating_sub(1))?;
                f.divide_by(one_minus(j), a)?;
            }
            for j in 0..n {
                for k in j + 1..n {
                    let pair = match spec.orientation {
                        PairOrientation::KMinusJ => diff(k, j),
                        PairOrientation::JMinusK => diff(j, k),
                    };
                    f.divide_by(pair, twoc)?;
                    f.divide_by(&one_minus(k) - &x(j), twoc)?;
                }
            }
        }
    }
    Ok(f)
}

/// Exact closed-form value of the instance.
pub fn rhs(spec: &IdentitySpec) -> Result<Rational> {
    let spec = spec.normalized()?;
    match spec.family {
        IdentityFamily::Cry => exact::catalan_product(spec.n),
        IdentityFamily::Mm => exact::mm_rhs(spec.n),
        IdentityFamily::Morris => exact::morris_rhs(spec.n, spec.a, spec.b, spec.twoc),
        IdentityFamily::Thm => {
            let value = exact::thm_rhs(spec.n, spec.a, spec.twoc)?;
            Ok(match spec.orientation {
                PairOrientation::KMinusJ => value,
                // flipping every pair factor multiplies by (-1)^{2c binom(n,2)}
                PairOrientation::JMinusK if (spec.twoc * spec.n * (spec.n - 1) / 2) % 2 == 1 => -value,
                PairOrientation::JMinusK => value,
            })
        }
    }
}

/// Exact constant term of the instance's integrand.
pub fn lhs(spec: &IdentitySpec) -> Result<Rational> {
    lhs_with_order(spec, &CtOrder::natural(spec.n as usize))
}

pub fn lhs_with_order(spec: &IdentitySpec, order: &CtOrder) -> Result<Rational> {
    build_integrand(spec)?.ct_iterated(order)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec: IdentitySpec,
    #[serde(with = "exact::rational_serde")]
    pub lhs: Rational,
    #[serde(with = "exact::rational_serde")]
    pub rhs: Rational,
    pub equal: bool,
    #[serde(rename = "elapsed_ms", with = "millis")]
    pub elapsed: Duration,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(ms.max(0.0) / 1e3))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lhs={} rhs={} {} ({:.1} ms)",
            self.spec,
            self.lhs,
            self.rhs,
            if self.equal { "equal" } else { "MISMATCH" },
            self.elapsed.as_secs_f64() * 1e3
        )
    }
}

/// Computes both sides exactly. A mismatch is reported, not raised.
pub fn verify(spec: &IdentitySpec) -> Result<VerificationReport> {
    verify_with_order(spec, &CtOrder::natural(spec.n as usize))
}

pub fn verify_with_order(spec: &IdentitySpec, order: &CtOrder) -> Result<VerificationReport> {
    let start = Instant::now();
    let spec = spec.normalized()?;
    let rhs = rhs(&spec)?;
    let lhs = lhs_with_order(&spec, order)?;
    Ok(VerificationReport { spec, equal: lhs == rhs, lhs, rhs, elapsed: start.elapsed() })
}

fn g(twice: i64) -> GammaValue {
    gamma_half(HalfInt::from_twice(twice)).expect("argument is positive")
}

/// Checks `(1/n!) prod_{j<n} Gamma((n+3+j)/2) Gamma(1/2) /
/// (Gamma((4+j)/2) Gamma((1+j)/2) Gamma((2+j)/2)) = prod_{k<=n} Cat(k)`.
pub fn check_cat_identity(n: u64) -> bool {
    if n < 1 {
        return false;
    }
    let n_i = n as i64;
    let mut acc = GammaValue::rational(Rational::new(BigInt::one(), exact::factorial(n)));
    for j in 0..n_i {
        acc = acc * g(n_i + 3 + j) * g(1) / g(4 + j) / g(1 + j) / g(2 + j);
    }
    match (acc.to_rational(), exact::catalan_product(n)) {
        (Ok(lhs), Ok(rhs)) => lhs == rhs,
        _ => false,
    }
}

/// Checks `Gamma(n+1) Gamma(1/2) / (Gamma((n+2)/2) Gamma((n+1)/2)) = 2^n`.
pub fn check_ratio_identity(n: u64) -> bool {
    if n < 1 {
        return false;
    }
    let n_i = n as i64;
    let ratio = g(2 * n_i + 2) * g(1) / g(n_i + 2) / g(n_i + 1);
    ratio.pi_half_exp == 0 && ratio.rational_part == exact::pow2(n_i)
}

/// Number of denominator factors that involve two variables.
pub fn pair_factor_count(f: &Factored<Rational>) -> usize {
    f.denominator().iter().filter(|(h, _)| h.variables().len() == 2).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn integrand_examples() {
        let cry1 = build_integrand(&IdentitySpec::cry(1)).unwrap();
        assert_eq!(cry1.numerator(), &Polynomial::one());
        assert_eq!(cry1.denominator(), &[(poly("1 - x1"), 2)]);

        let mm2 = build_integrand(&IdentitySpec::mm(2)).unwrap();
        let expected = Factored::new(Polynomial::one())
            .over(poly("x1"), 1)
            .and_then(|f| f.over(poly("1 - x1"), 2))
            .and_then(|f| f.over(poly("x2"), 1))
            .and_then(|f| f.over(poly("1 - x2"), 2))
            .and_then(|f| f.over(poly("x2 - x1"), 1))
            .and_then(|f| f.over(poly("1 - x1 - x2"), 1))
            .unwrap();
        assert_eq!(mm2, expected);

        let thm = build_integrand(&IdentitySpec::thm(1, 3, 2)).unwrap();
        assert_eq!(thm.numerator(), &Polynomial::one());
        assert_eq!(thm.denominator(), &[(poly("x1"), 2), (poly("1 - x1"), 3)]);

        let thm_a1 = build_integrand(&IdentitySpec::thm(2, 1, 1)).unwrap();
        assert!(thm_a1.denominator().iter().all(|(h, _)| h.as_scaled_var().is_none()));

        let thm_a0 = build_integrand(&IdentitySpec::thm(1, 0, 1)).unwrap();
        assert_eq!(thm_a0.numerator(), &poly("x1"));
    }

    #[test]
    fn structural_factor_counts() {
        for n in 1..=4u64 {
            let pairs = (n * (n - 1)) as usize;
            let mm = build_integrand(&IdentitySpec::mm(n)).unwrap();
            assert_eq!(pair_factor_count(&mm), pairs);
            assert_eq!(mm.denominator().len(), pairs + 2 * n as usize);
            let thm = build_integrand(&IdentitySpec::thm(n, 1, 2)).unwrap();
            assert_eq!(pair_factor_count(&thm), pairs);
            assert_eq!(thm.denominator().len(), pairs + n as usize);
            let cry = build_integrand(&IdentitySpec::cry(n)).unwrap();
            assert_eq!(pair_factor_count(&cry), pairs / 2);
        }
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs(&IdentitySpec::cry(3)).unwrap(), int(10));
        assert_eq!(rhs(&IdentitySpec::mm(3)).unwrap(), int(5120));
        assert_eq!(rhs(&IdentitySpec::morris(2, 2, 0, 1)).unwrap(), int(2));
    }

    #[test]
    fn verify_examples() {
        let r = verify(&IdentitySpec::cry(2)).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, int(2));
        let r = verify(&IdentitySpec::mm(2)).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, int(32));
        let r = verify(&IdentitySpec::thm(2, 1, 1)).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, exact::thm_rhs(2, 1, 1).unwrap());
    }

    #[test]
    fn flipped_orientation_changes_sign_for_odd_twoc() {
        let spec = IdentitySpec::thm(2, 2, 1).with_orientation(PairOrientation::JMinusK);
        let r = verify(&spec).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, int(-32));
    }

    #[test]
    fn gamma_identities() {
        for n in 1..=10 {
            assert!(check_cat_identity(n), "cat n={n}");
            assert!(check_ratio_identity(n), "ratio n={n}");
        }
        assert!(!check_cat_identity(0));
    }

    #[test]
    fn invalid_specs() {
        assert!(build_integrand(&IdentitySpec::cry(0)).is_err());
        assert!(rhs(&IdentitySpec::morris(2, 1, 0, 0)).is_err());
    }

    #[test]
    fn spec_json() {
        let spec: IdentitySpec = serde_json::from_str(r#"{"family":"MM","n":3,"a":2,"b":0,"twoc":1}"#).unwrap();
        assert_eq!(spec, IdentitySpec::mm(3));
        assert_eq!(serde_json::to_string(&spec).unwrap(), r#"{"family":"MM","n":3,"a":2,"b":0,"twoc":1}"#);
        let thm: IdentitySpec =
            serde_json::from_str(r#"{"family":"THM","n":2,"a":2,"twoc":1,"orientation":"jk"}"#).unwrap();
        assert_eq!(thm.orientation, PairOrientation::JMinusK);
    }
}
