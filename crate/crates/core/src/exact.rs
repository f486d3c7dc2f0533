//! Exact arithmetic for the closed-form sides of the identities.
//!
//! Gamma values at half-integers are carried as a rational multiple of a
//! power of `sqrt(pi)`, so every product of Gammas that is rational in
//! fact comes out as an exact [`Rational`].

use std::fmt;
use std::ops::{Div, Mul};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CtError, Result};

pub type Rational = BigRational;

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn rational_string(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| CtError::Parse(format!("bad rational `{s}`")))?;
            let q: BigInt = q.trim().parse().map_err(|_| CtError::Parse(format!("bad rational `{s}`")))?;
            if q.is_zero() {
                return Err(CtError::Parse(format!("zero denominator in `{s}`")));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(
            s.parse().map_err(|_| CtError::Parse(format!("bad rational `{s}`")))?,
        ),
    };
    Ok(parsed)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

static PASCAL: RwLock<Vec<Vec<BigInt>>> = RwLock::new(Vec::new());

/// `binom(n, k)`, served from a process-wide Pascal triangle that grows on
/// demand. Returns zero for `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    {
        let table = PASCAL.read().expect("binomial table poisoned");
        if let Some(row) = table.get(n) {
            return row[k].clone();
        }
    }
    let mut table = PASCAL.write().expect("binomial table poisoned");
    while table.len() <= n {
        let next = match table.last() {
            None => vec![BigInt::one()],
            Some(prev) => {
                let mut row = Vec::with_capacity(prev.len() + 1);
                row.push(BigInt::one());
                for w in prev.windows(2) {
                    row.push(&w[0] + &w[1]);
                }
                row.push(BigInt::one());
                row
            }
        };
        table.push(next);
    }
    table[n][k].clone()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `2^e` for a possibly negative exponent.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// A half-integer `q`, stored as the integer `2q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice_value(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn is_nonpositive_integer(self) -> bool {
        self.is_integer() && self.twice <= 0
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.twice), BigInt::from(2))
    }

    pub const fn add_int(self, n: i64) -> Self {
        HalfInt { twice: self.twice + 2 * n }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// `rational_part * sqrt(pi)^pi_half_exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaValue {
    pub rational_part: Rational,
    pub pi_half_exp: i64,
}

impl GammaValue {
    pub fn rational(q: Rational) -> Self {
        GammaValue { rational_part: q, pi_half_exp: 0 }
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    /// The exact value, provided all `sqrt(pi)` factors cancelled.
    pub fn to_rational(&self) -> Result<Rational> {
        if self.pi_half_exp != 0 && !self.rational_part.is_zero() {
            return Err(CtError::NonRational(self.pi_half_exp));
        }
        Ok(self.rational_part.clone())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.rational_part.to_f64().unwrap_or(f64::NAN)
            * std::f64::consts::PI.sqrt().powi(self.pi_half_exp as i32)
    }
}

impl Mul for GammaValue {
    type Output = GammaValue;

    fn mul(self, rhs: GammaValue) -> GammaValue {
        GammaValue {
            rational_part: self.rational_part * rhs.rational_part,
            pi_half_exp: self.pi_half_exp + rhs.pi_half_exp,
        }
    }
}

impl Div for GammaValue {
    type Output = GammaValue;

    /// Panics on division by a zero value; Gamma never vanishes.
    fn div(self, rhs: GammaValue) -> GammaValue {
        GammaValue {
            rational_part: self.rational_part / rhs.rational_part,
            pi_half_exp: self.pi_half_exp - rhs.pi_half_exp,
        }
    }
}

/// Exact `Gamma(q)` for a half-integer `q` that is not a pole.
///
/// Integers give `(q-1)!`; strict half-integers start from
/// `Gamma(1/2) = sqrt(pi)` and walk the recurrence `Gamma(x+1) = x Gamma(x)`
/// up or down, so negative half-integers are fine.
pub fn gamma_half(q: HalfInt) -> Result<GammaValue> {
    if q.is_nonpositive_integer() {
        return Err(CtError::Pole(q.to_string()));
    }
    if q.is_integer() {
        let n = (q.twice_value() / 2) as u64;
        return Ok(GammaValue::rational(Rational::from_integer(factorial(n - 1))));
    }
    let mut value = Rational::one();
    let mut x = HalfInt::from_twice(1);
    if q > x {
        while x < q {
            value *= x.to_rational();
            x = x.add_int(1);
        }
    } else {
        while x > q {
            x = x.add_int(-1);
            value /= x.to_rational();
        }
    }
    Ok(GammaValue { rational_part: value, pi_half_exp: 1 })
}

/// `Cat(k) = binom(2k, k) / (k + 1)`.
pub fn catalan(k: u64) -> Result<Rational> {
    if k < 1 {
        return Err(CtError::Domain("Catalan index must be at least 1".into()));
    }
    let k = k as usize;
    let (q, r) = binomial(2 * k, k).div_rem(&BigInt::from(k + 1));
    debug_assert!(r.is_zero());
    Ok(Rational::from_integer(q))
}

/// `Cat(1) Cat(2) ... Cat(n)`.
pub fn catalan_product(n: u64) -> Result<Rational> {
    if n < 1 {
        return Err(CtError::Domain("n must be at least 1".into()));
    }
    (1..=n).try_fold(Rational::one(), |acc, k| Ok(acc * catalan(k)?))
}

/// `(1/n!) prod_{j<n} num_args(j) / den_args(j)` over Gamma values.
///
/// A pole among the numerator arguments is an error. A pole among the
/// denominator arguments makes the reciprocal Gamma vanish and the whole
/// product is zero.
fn gamma_ratio_product<F>(n: u64, args: F) -> Result<Rational>
where
    F: Fn(i64) -> ([HalfInt; 2], [HalfInt; 3]),
{
    let rows: Vec<_> = (0..n as i64).map(&args).collect();
    if let Some(pole) = rows.iter().flat_map(|(num, _)| num.iter()).find(|q| q.is_nonpositive_integer()) {
        return Err(CtError::Pole(pole.to_string()));
    }
    if rows.iter().flat_map(|(_, den)| den.iter()).any(|q| q.is_nonpositive_integer()) {
        return Ok(Rational::zero());
    }
    let mut acc = GammaValue::rational(Rational::new(BigInt::one(), factorial(n)));
    for (num, den) in rows {
        for q in num {
            acc = acc * gamma_half(q)?;
        }
        for q in den {
            acc = acc / gamma_half(q)?;
        }
    }
    acc.to_rational()
}

/// Closed form of the Morris constant term with parameters `a`, `b` and
/// `c = twoc / 2`:
/// `(1/n!) prod_j Gamma(a+b+(n-1+j)c) Gamma(c) / (Gamma(a+jc) Gamma(c+jc) Gamma(b+jc+1))`.
pub fn morris_rhs(n: u64, a: u64, b: u64, twoc: u64) -> Result<Rational> {
    if n < 1 || twoc < 1 {
        return Err(CtError::Domain("morris_rhs needs n >= 1 and twoc >= 1".into()));
    }
    let (n_i, a, b, c2) = (n as i64, a as i64, b as i64, twoc as i64);
    gamma_ratio_product(n, |j| {
        (
            [HalfInt::from_twice(2 * a + 2 * b + (n_i - 1 + j) * c2), HalfInt::from_twice(c2)],
            [
                HalfInt::from_twice(2 * a + j * c2),
                HalfInt::from_twice(c2 + j * c2),
                HalfInt::from_twice(2 * b + j * c2 + 2),
            ],
        )
    })
}

/// `2^{n^2} prod_{k<=n} Cat(k)`.
pub fn mm_rhs(n: u64) -> Result<Rational> {
    if n < 1 {
        return Err(CtError::Domain("mm_rhs needs n >= 1".into()));
    }
    Ok(pow2((n * n) as i64) * catalan_product(n)?)
}

/// Exponent `2an + 4c binom(n,2) - 2n` of the power-of-two prefactor in the
/// type-D closed form, with `4c = 2 twoc`.
pub fn thm_prefactor_exponent(n: u64, a: u64, twoc: u64) -> i64 {
    let (n, a, c2) = (n as i64, a as i64, twoc as i64);
    2 * a * n + 2 * c2 * (n * (n - 1) / 2) - 2 * n
}

/// Closed form of the type-D constant term:
/// `2^{2an+4c binom(n,2)-2n} (1/n!) prod_j Gamma(a-1/2+(n-1+j)c) Gamma(c) /
/// (Gamma(1/2+jc) Gamma(c+jc) Gamma(a+jc))`.
pub fn thm_rhs(n: u64, a: u64, twoc: u64) -> Result<Rational> {
    if n < 1 || twoc < 1 {
        return Err(CtError::Domain("thm_rhs needs n >= 1 and twoc >= 1".into()));
    }
    let (n_i, a_i, c2) = (n as i64, a as i64, twoc as i64);
    let product = gamma_ratio_product(n, |j| {
        (
            [HalfInt::from_twice(2 * a_i - 1 + (n_i - 1 + j) * c2), HalfInt::from_twice(c2)],
            [
                HalfInt::from_twice(1 + j * c2),
                HalfInt::from_twice(c2 + j * c2),
                HalfInt::from_twice(2 * a_i + j * c2),
            ],
        )
    })?;
    Ok(pow2(thm_prefactor_exponent(n, a, twoc)) * product)
}

/// `binom(n, k)` as a rational, convenient for closed-form comparisons.
pub fn binomial_rational(n: u64, k: u64) -> Rational {
    Rational::from_integer(binomial(n as usize, k as usize))
}
