//! Iterated constant-term extraction.
//!
//! An integrand is a [`Factored`] rational function: a numerator polynomial
//! over a list of powered denominator factors, each affine in every single
//! variable. The constant term in `v` is read off the Taylor expansion at
//! `v = 0` with the other variables held as parameters. That is the residue
//! at the origin under the contour ordering `|x_1| < |x_2| < ... < |x_n|`,
//! provided extraction runs innermost-first.
//!
//! For a factor `h = h0 + h1 v` the expansion is the closed binomial series
//!
//! ```text
//! (h0 + h1 v)^{-e} = sum_t binom(e+t-1, t) (-h1)^t h0^{-e-t} v^t
//! ```
//!
//! so every denominator produced along the way is a power of some `h0`. No
//! polynomial division or GCD is ever needed.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CtError, Result};
use crate::exact::binomial;
use crate::poly::{parse_poly, Polynomial, VarIndex};
use crate::scalar::Scalar;

/// `numerator / prod factor^exponent`.
///
/// Pure monomial factors are split into single variables, constant factors
/// are folded into the numerator and proportional factors are merged. The
/// representation is not reduced otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Factored<T: Scalar> {
    numerator: Polynomial<T>,
    denominator: Vec<(Polynomial<T>, u32)>,
}

impl<T: Scalar> Factored<T> {
    pub fn new(numerator: Polynomial<T>) -> Self {
        Factored { numerator, denominator: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::new(Polynomial::zero())
    }

    pub fn numerator(&self) -> &Polynomial<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &[(Polynomial<T>, u32)] {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Builder form of [`Factored::divide_by`].
    pub fn over(mut self, factor: Polynomial<T>, exponent: u32) -> Result<Self> {
        self.divide_by(factor, exponent)?;
        Ok(self)
    }

    /// Multiplies by `factor^{-exponent}`.
    pub fn divide_by(&mut self, factor: Polynomial<T>, exponent: u32) -> Result<()> {
        if exponent == 0 {
            return Ok(());
        }
        if factor.is_zero() {
            return Err(CtError::Domain("zero denominator factor".into()));
        }
        if factor.is_constant() {
            let c = factor.constant_term().pow_u32(exponent);
            self.numerator = self.numerator.scale(&(T::one() / c));
            return Ok(());
        }
        if let Some((m, c)) = factor.as_term() {
            let c = c.pow_u32(exponent);
            let vars: Vec<(VarIndex, u32)> = m.factors().collect();
            self.numerator = self.numerator.scale(&(T::one() / c));
            for (v, k) in vars {
                self.push_merged(Polynomial::var(v), k * exponent);
            }
            return Ok(());
        }
        self.push_merged(factor, exponent);
        Ok(())
    }

    fn push_merged(&mut self, factor: Polynomial<T>, exponent: u32) {
        for (g, e) in &mut self.denominator {
            if let Some(ratio) = factor.ratio_to(g) {
                *e += exponent;
                self.numerator = self.numerator.scale(&(T::one() / ratio.pow_u32(exponent)));
                return;
            }
        }
        self.denominator.push((factor, exponent));
    }

    pub fn variables(&self) -> Vec<VarIndex> {
        let mut vars = self.numerator.variables();
        for (h, _) in &self.denominator {
            vars.extend(h.variables());
        }
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn scale(&self, c: &T) -> Self {
        Factored { numerator: self.numerator.scale(c), denominator: self.denominator.clone() }
    }

    /// Product of all denominator factors, expanded.
    pub fn expanded_denominator(&self) -> Polynomial<T> {
        self.denominator.iter().fold(Polynomial::one(), |acc, (h, e)| &acc * &h.pow(*e))
    }

    /// Sum over the least common factor list (max exponent per factor).
    pub fn add(&self, other: &Self) -> Self {
        let mut den = self.denominator.clone();
        for (g, e) in &other.denominator {
            match den.iter_mut().find(|(h, _)| h == g) {
                Some((_, f)) => *f = (*f).max(*e),
                None => den.push((g.clone(), *e)),
            }
        }
        let lift = |f: &Self| {
            den.iter().fold(f.numerator.clone(), |acc, (h, e)| {
                let have = f.denominator.iter().find(|(g, _)| g == h).map_or(0, |(_, k)| *k);
                &acc * &h.pow(e - have)
            })
        };
        let numerator = &lift(self) + &lift(other);
        Factored { numerator, denominator: den }
    }

    /// Equality as rational functions, by cross multiplication.
    pub fn same_function(&self, other: &Self) -> bool {
        &self.numerator * &other.expanded_denominator() == &other.numerator * &self.expanded_denominator()
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let den = self
            .denominator
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, (h, e)| acc * h.eval_complex(point).powu(*e));
        self.numerator.eval_complex(point) / den
    }

    /// Order of the pole at `x_v = 0`: the exponent of the factor `x_v`
    /// minus the `x_v`-valuation of the numerator, floored at zero.
    pub fn pole_order(&self, v: VarIndex) -> u32 {
        if self.numerator.is_zero() {
            return 0;
        }
        let pole: u32 = self
            .denominator
            .iter()
            .filter(|(h, _)| is_var(h, v))
            .map(|(_, e)| *e)
            .sum();
        pole.saturating_sub(self.numerator.valuation_in(v))
    }

    /// Constant term in `x_v`, as a function of the remaining variables.
    ///
    /// `x_v` must be the innermost remaining variable for the result to be
    /// the residue under the radius ordering; this is not checked here.
    pub fn ct_var(&self, v: VarIndex) -> Result<Self> {
        if self.numerator.is_zero() {
            return Ok(Self::zero());
        }
        let mut pole = 0u32;
        let mut expanding = Vec::new();
        let mut kept = Vec::new();
        for (h, e) in &self.denominator {
            if is_var(h, v) {
                pole += e;
            } else if h.contains_var(v) {
                let degree = h.degree_in(v);
                if degree > 1 {
                    return Err(CtError::NonAffine { factor: h.to_string(), var: v + 1, degree });
                }
                let h0 = h.coeff_of(v, 0);
                if h0.is_zero() {
                    return Err(CtError::ZeroConstant { factor: h.to_string(), var: v + 1 });
                }
                expanding.push((h0, h.coeff_of(v, 1), *e));
            } else {
                kept.push((h.clone(), *e));
            }
        }

        let valuation = self.numerator.valuation_in(v);
        if valuation > pole {
            return Ok(Self::zero());
        }
        let order = (pole - valuation) as usize;
        let mut series = self.numerator.unshift_var(v, valuation).split_by(v);
        series.resize(order + 1, Polynomial::zero());

        let mut result = Factored::new(Polynomial::one());
        let last = expanding.len().saturating_sub(1);
        for (i, (h0, h1, e)) in expanding.into_iter().enumerate() {
            let factor_series = reciprocal_series(&h0, &h1, e, order);
            if !h0.is_constant() {
                result.denominator.push((h0, e + order as u32));
            }
            series = if i == last {
                let mut top = vec![Polynomial::zero(); order + 1];
                top[order] = truncated_coefficient(&series, &factor_series, order);
                top
            } else {
                truncated_product(&series, &factor_series, order)
            };
        }
        let numerator = series.swap_remove(order);
        if numerator.is_zero() {
            return Ok(Self::zero());
        }

        let pending = std::mem::take(&mut result.denominator);
        result.numerator = numerator;
        for (h, e) in kept.into_iter().chain(pending) {
            result.divide_by(h, e)?;
        }
        result.cancel_monomials();
        Ok(result)
    }

    /// Cancels single-variable denominator factors against the numerator.
    fn cancel_monomials(&mut self) {
        for idx in 0..self.denominator.len() {
            let Some((w, c)) = self.denominator[idx].0.as_scaled_var() else { continue };
            debug_assert!(c.is_one());
            let k = self.numerator.valuation_in(w).min(self.denominator[idx].1);
            if k > 0 {
                self.numerator = self.numerator.unshift_var(w, k);
                self.denominator[idx].1 -= k;
            }
        }
        self.denominator.retain(|(_, e)| *e > 0);
    }

    /// `CT_{order[last]} ... CT_{order[0]}` of the function.
    pub fn ct_iterated(&self, order: &CtOrder) -> Result<T> {
        let mut f = self.clone();
        for &v in order.sequence() {
            f = f.ct_var(v)?;
            if f.is_zero() {
                return Ok(T::zero());
            }
        }
        if let Some(&v) = f.variables().first() {
            return Err(CtError::ResidualVariable(v + 1));
        }
        debug_assert!(f.denominator.is_empty());
        Ok(f.numerator.constant_term())
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Factored<U> {
        Factored {
            numerator: self.numerator.map_coeffs(&f),
            denominator: self.denominator.iter().map(|(h, e)| (h.map_coeffs(&f), *e)).collect(),
        }
    }
}

fn is_var<T: Scalar>(h: &Polynomial<T>, v: VarIndex) -> bool {
    matches!(h.as_scaled_var(), Some((w, c)) if w == v && c.is_one())
}

/// Coefficients `t = 0..=order` of `h0^{e+order} (h0 + h1 v)^{-e}`, or of
/// `(h0 + h1 v)^{-e}` itself when `h0` is a constant.
fn reciprocal_series<T: Scalar>(h0: &Polynomial<T>, h1: &Polynomial<T>, e: u32, order: usize) -> Vec<Polynomial<T>> {
    let neg_h1 = -h1;
    let e_us = e as usize;
    let binom = |t: usize| T::from_bigint(&binomial(e_us + t - 1, t));
    if h0.is_constant() {
        let inv = T::one() / h0.constant_term();
        let mut scale = inv.pow_u32(e);
        let mut h1_pow = Polynomial::one();
        let mut out = Vec::with_capacity(order + 1);
        for t in 0..=order {
            out.push(h1_pow.scale(&(binom(t) * scale.clone())));
            if t < order {
                h1_pow = &h1_pow * &neg_h1;
                scale = scale * inv.clone();
            }
        }
        return out;
    }
    // h0 powers 0..=order, h1 powers 0..=order
    let mut h0_pows = Vec::with_capacity(order + 1);
    h0_pows.push(Polynomial::one());
    for i in 1..=order {
        let next = &h0_pows[i - 1] * h0;
        h0_pows.push(next);
    }
    let mut out = Vec::with_capacity(order + 1);
    let mut h1_pow = Polynomial::one();
    for t in 0..=order {
        out.push((&h1_pow * &h0_pows[order - t]).scale(&binom(t)));
        if t < order {
            h1_pow = &h1_pow * &neg_h1;
        }
    }
    out
}

fn truncated_product<T: Scalar>(a: &[Polynomial<T>], b: &[Polynomial<T>], order: usize) -> Vec<Polynomial<T>> {
    (0..=order).map(|k| truncated_coefficient(a, b, k)).collect()
}

fn truncated_coefficient<T: Scalar>(a: &[Polynomial<T>], b: &[Polynomial<T>], k: usize) -> Polynomial<T> {
    let mut acc = Polynomial::zero();
    for i in 0..=k {
        let (x, y) = (&a[i], &b[k - i]);
        if !x.is_zero() && !y.is_zero() {
            acc = acc + x * y;
        }
    }
    acc
}

impl<T: Scalar> fmt::Display for Factored<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerator)?;
        if self.denominator.is_empty() {
            return Ok(());
        }
        write!(f, " / (")?;
        for (i, (h, e)) in self.denominator.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "({h})")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        write!(f, ")")
    }
}

/// Wire form `{"num": "<poly>", "den": [["<poly>", exp], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactoredJson {
    pub num: String,
    #[serde(default)]
    pub den: Vec<(String, u32)>,
}

impl<T: Scalar> Factored<T> {
    pub fn to_json(&self) -> FactoredJson {
        FactoredJson {
            num: self.numerator.to_string(),
            den: self.denominator.iter().map(|(h, e)| (h.to_string(), *e)).collect(),
        }
    }

    pub fn from_json(json: &FactoredJson) -> Result<Self> {
        let mut f = Factored::new(parse_poly(&json.num)?);
        for (h, e) in &json.den {
            f.divide_by(parse_poly(h)?, *e)?;
        }
        Ok(f)
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        let json: FactoredJson = serde_json::from_str(src).map_err(|e| CtError::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

/// Extraction order, innermost variable first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtOrder(Vec<VarIndex>);

impl CtOrder {
    /// `x_1, x_2, ..., x_n`: the order fixed by the radii `|x_j| = j eps`.
    pub fn natural(n: usize) -> Self {
        CtOrder((0..n).collect())
    }

    /// Accepts any permutation of `0..len`.
    pub fn new(sequence: Vec<VarIndex>) -> Result<Self> {
        let mut seen = vec![false; sequence.len()];
        for &v in &sequence {
            match seen.get_mut(v) {
                Some(s) if !*s => *s = true,
                Some(_) => return Err(CtError::Order(format!("x{} repeated", v + 1))),
                None => return Err(CtError::Order(format!("x{} out of range for {} variables", v + 1, sequence.len()))),
            }
        }
        Ok(CtOrder(sequence))
    }

    /// Parses a comma list of 1-based indices such as `1,2,3`.
    pub fn parse(src: &str) -> Result<Self> {
        let seq = src
            .split(',')
            .map(|s| {
                let s = s.trim();
                let s = s.strip_prefix('x').unwrap_or(s);
                match s.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(CtError::Order(format!("bad variable `{s}`"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(seq)
    }

    pub fn sequence(&self) -> &[VarIndex] {
        &self.0
    }

    pub fn is_natural(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
