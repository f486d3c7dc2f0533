//! Brute-force Laurent expansion used as an independent reference.
//!
//! In the region `|x_1| < |x_2| < ... < |x_n|` (all small) the substitution
//! `x_j = y_j y_{j+1} ... y_n` turns every factor into a monomial times a
//! power series in `y`, and maps `x^0` to `y^0`. The constant term then
//! reduces to one coefficient of a truncated power-series product.

#![allow(dead_code)]

pub mod props;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Series = HashMap<Vec<u32>, BigRational>;

/// One factor of a product integrand, in the `x` variables (0-based).
#[derive(Debug, Clone, Copy)]
pub enum Factor {
    /// `x_j^p`
    Power(usize, i64),
    /// `(1 - x_j)^{-e}`
    OneMinus(usize, u32),
    /// `(x_k - x_j)^{-e}` for `j < k`, or `(x_j - x_k)^{-e}` when `flipped`.
    Pair { j: usize, k: usize, e: u32, flipped: bool },
    /// `(1 - x_k - x_j)^{-e}`
    OneMinusPair(usize, usize, u32),
}

fn binom(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `y`-exponent vector of the `x`-monomial with exponents `alpha`.
fn to_y(alpha: &[i64]) -> Vec<i64> {
    let mut acc = 0;
    alpha.iter().map(|a| {
        acc += a;
        acc
    }).collect()
}

fn x_in_y(j: usize, n: usize) -> Vec<u32> {
    (0..n).map(|i| u32::from(i >= j)).collect()
}

fn fits(m: &[u32], bound: &[u32]) -> bool {
    m.iter().zip(bound).all(|(a, b)| a <= b)
}

fn mul(a: &Series, b: &Series, bound: &[u32]) -> Series {
    let mut out = Series::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            if fits(&m, bound) {
                *out.entry(m).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn one(n: usize) -> Series {
    Series::from([(vec![0; n], BigRational::one())])
}

/// `(1 - u)^{-e}` truncated, for `u` without constant term.
fn inverse_power(u: &Series, e: u32, bound: &[u32]) -> Series {
    let n = bound.len();
    let mut out = one(n);
    let mut power = one(n);
    for s in 1u64.. {
        power = mul(&power, u, bound);
        if power.is_empty() {
            break;
        }
        let c = BigRational::from_integer(binom(e as u64 + s - 1, s));
        for (m, v) in &power {
            *out.entry(m.clone()).or_insert_with(BigRational::zero) += &c * v;
        }
    }
    out
}

/// Iterated constant term (innermost `x_1` first) of the product.
pub fn brute_ct(n: usize, factors: &[Factor]) -> BigRational {
    let mut alpha = vec![0i64; n];
    let mut sign = BigRational::one();
    for f in factors {
        match *f {
            Factor::Power(j, p) => alpha[j] += p,
            Factor::Pair { k, e, flipped, .. } => {
                alpha[k] -= e as i64;
                if flipped && e % 2 == 1 {
                    sign = -sign;
                }
            }
            _ => {}
        }
    }
    let beta = to_y(&alpha);
    if beta.iter().any(|&b| b > 0) {
        return BigRational::zero();
    }
    let bound: Vec<u32> = beta.iter().map(|&b| (-b) as u32).collect();
    let mut acc = one(n);
    for f in factors {
        let u: Series = match *f {
            Factor::Power(..) => continue,
            Factor::OneMinus(j, _) => Series::from([(x_in_y(j, n), BigRational::one())]),
            Factor::Pair { j, k, .. } => {
                let m = (0..n).map(|i| u32::from(i >= j && i < k)).collect();
                Series::from([(m, BigRational::one())])
            }
            Factor::OneMinusPair(j, k, _) => {
                let mut s = Series::from([(x_in_y(j, n), BigRational::one())]);
                *s.entry(x_in_y(k, n)).or_insert_with(BigRational::zero) += BigRational::one();
                s
            }
        };
        let e = match *f {
            Factor::OneMinus(_, e) | Factor::Pair { e, .. } | Factor::OneMinusPair(_, _, e) => e,
            Factor::Power(..) => unreachable!(),
        };
        acc = mul(&acc, &inverse_power(&u, e, &bound), &bound);
    }
    sign * acc.get(&bound).cloned().unwrap_or_else(BigRational::zero)
}

pub fn cry_factors(n: usize) -> Vec<Factor> {
    let mut f: Vec<Factor> = (0..n).map(|j| Factor::OneMinus(j, 2)).collect();
    for j in 0..n {
        for k in j + 1..n {
            f.push(Factor::Pair { j, k, e: 1, flipped: false });
        }
    }
    f
}

pub fn morris_factors(n: usize, a: u32, b: u32, twoc: u32) -> Vec<Factor> {
    let mut f = Vec::new();
    for j in 0..n {
        f.push(Factor::OneMinus(j, a));
        f.push(Factor::Power(j, -(b as i64)));
    }
    for j in 0..n {
        for k in j + 1..n {
            f.push(Factor::Pair { j, k, e: twoc, flipped: false });
        }
    }
    f
}

pub fn typed_factors(n: usize, a: u32, twoc: u32, flipped: bool) -> Vec<Factor> {
    let mut f = Vec::new();
    for j in 0..n {
        f.push(Factor::Power(j, 1 - a as i64));
        f.push(Factor::OneMinus(j, a));
    }
    for j in 0..n {
        for k in j + 1..n {
            f.push(Factor::Pair { j, k, e: twoc, flipped });
            f.push(Factor::OneMinusPair(j, k, twoc));
        }
    }
    f
}
