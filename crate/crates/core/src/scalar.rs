//! Coefficient scalars.
//!
//! Polynomials and factored rational functions are generic over any type
//! implementing [`Scalar`]. The exact engine runs over [`BigRational`];
//! `f64` is supported for quick floating-point experiments.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

pub trait Scalar:
    Num + Clone + Neg<Output = Self> + PartialEq + Debug + Display + Send + Sync + 'static
{
    fn from_bigint(n: &BigInt) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// Parses an unsigned integer or `p/q` literal.
    fn parse_literal(s: &str) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    /// Whether the value is negative; used only for rendering signs.
    fn is_negative_value(&self) -> bool;

    fn pow_u32(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        crate::exact::parse_rational(s).ok()
    }

    fn is_negative_value(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
}

impl Scalar for f64 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn parse_literal(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((p, q)) => Some(p.parse::<f64>().ok()? / q.parse::<f64>().ok()?),
            None => s.parse().ok(),
        }
    }

    fn is_negative_value(&self) -> bool {
        *self < 0.0
    }
}
