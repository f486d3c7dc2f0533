//! Sparse multivariate polynomials.
//!
//! Variables are dense indices `0..n`, rendered 1-based as `x1, x2, ...`.
//! Terms are kept in a `BTreeMap` under graded order, so two equal
//! polynomials always have identical term maps.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{CtError, Result};
use crate::scalar::Scalar;

pub type VarIndex = usize;

/// Power product `prod x_v^e`, stored as `(v, e)` pairs sorted by `v`.
/// Zero exponents are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var_pow(v: VarIndex, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v as u32, e)])
        }
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| (v as u32, e))
                .collect(),
        )
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarIndex) -> u32 {
        self.0
            .binary_search_by_key(&(v as u32), |&(var, _)| var)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (VarIndex, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as VarIndex, e))
    }

    /// Copy with the exponent of `v` replaced.
    pub fn with_exponent(&self, v: VarIndex, e: u32) -> Self {
        let mut out: Vec<(u32, u32)> = self.0.iter().copied().filter(|&(var, _)| var != v as u32).collect();
        if e > 0 {
            let pos = out.partition_point(|&(var, _)| var < v as u32);
            out.insert(pos, (v as u32, e));
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl Ord for Monomial {
    /// Graded order: total degree first; ties go to the monomial with the
    /// larger exponent at the first differing variable, so `x1` sorts
    /// before `x2`.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        // the one holding the lower variable has the larger exponent there
                        return if va < vb { Ordering::Less } else { Ordering::Greater };
                    }
                    if ea != eb {
                        return eb.cmp(&ea);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.factors().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", v + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with coefficients in `T`. No zero coefficient is ever
/// stored; the empty map is the zero polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Scalar> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn var(v: VarIndex) -> Self {
        Self::monomial(Monomial::var_pow(v, 1), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, T)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn from_hash(acc: HashMap<Monomial, T>) -> Self {
        Polynomial { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().clone() + c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> T {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// `Some((v, c))` when the polynomial is `c * x_v` exactly.
    pub fn as_scaled_var(&self) -> Option<(VarIndex, T)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        let mut f = m.factors();
        match (f.next(), f.next()) {
            (Some((v, 1)), None) => Some((v, c.clone())),
            _ => None,
        }
    }

    /// `Some((m, c))` when the polynomial is a single term.
    pub fn as_term(&self) -> Option<(&Monomial, &T)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Sorted list of variables that occur.
    pub fn variables(&self) -> Vec<VarIndex> {
        let mut vars: Vec<VarIndex> = self.terms.keys().flat_map(|m| m.factors().map(|(v, _)| v)).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn contains_var(&self, v: VarIndex) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: VarIndex) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Smallest exponent of `v` over all terms; zero for the zero polynomial.
    pub fn valuation_in(&self, v: VarIndex) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Coefficient of `x_v^k`, as a polynomial in the other variables.
    pub fn coeff_of(&self, v: VarIndex, k: u32) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == k)
                .map(|(m, c)| (m.with_exponent(v, 0), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of `x_v^0, x_v^1, ...` up to the degree in `v`.
    pub fn split_by(&self, v: VarIndex) -> Vec<Self> {
        let mut out = vec![Self::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            out[m.exponent(v) as usize].terms.insert(m.with_exponent(v, 0), c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())).collect() }
    }

    /// Multiply by `x_v^k`.
    pub fn shift_var(&self, v: VarIndex, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let shift = Monomial::var_pow(v, k);
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.mul(&shift), c.clone())).collect() }
    }

    /// Divide by `x_v^k`; the caller guarantees `k <= valuation_in(v)`.
    pub fn unshift_var(&self, v: VarIndex, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let e = m.exponent(v);
                    assert!(e >= k, "unshift_var below valuation");
                    (m.with_exponent(v, e - k), c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `Some(c)` with `self = c * other`, when the two are proportional.
    pub fn ratio_to(&self, other: &Self) -> Option<T> {
        if self.terms.len() != other.terms.len() || self.is_zero() {
            return None;
        }
        let mut ratio: Option<T> = None;
        for ((ma, ca), (mb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            if ma != mb {
                return None;
            }
            let r = ca.clone() / cb.clone();
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev == r => {}
                Some(_) => return None,
            }
        }
        ratio
    }

    /// Floating-point evaluation; `point[v]` is the value of `x_v`.
    ///
    /// Panics if a variable of the polynomial has no entry in `point`.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = Complex64::new(c.to_f64_lossy(), 0.0);
            for (v, e) in m.factors() {
                term *= point[v].powu(e);
            }
            sum += term;
        }
        sum
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let (mut big, small) = if self.len() >= rhs.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in small.terms() {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl<T: Scalar> Add for Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Polynomial<T>) -> Polynomial<T> {
        let (mut big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        for (m, c) in small.terms {
            big.add_term(m, c);
        }
        big
    }
}

impl<T: Scalar> Neg for Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        -(self.clone())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Polynomial<T>) -> Polynomial<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut acc: HashMap<Monomial, T> = HashMap::with_capacity(self.len() * rhs.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let prod = ca.clone() * cb.clone();
                acc.entry(ma.mul(mb))
                    .and_modify(|x| *x = x.clone() + prod.clone())
                    .or_insert(prod);
            }
        }
        Polynomial::from_hash(acc)
    }
}

impl<T: Scalar> Mul for Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Polynomial<T>) -> Polynomial<T> {
        &self * &rhs
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative_value();
            let abs = if negative { -c.clone() } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Parses the rendering produced by `Display`, e.g. `1 - x1 - 3/2*x2^2*x3`.
/// Terms may repeat and factors may appear in any order.
pub fn parse_poly<T: Scalar>(src: &str) -> Result<Polynomial<T>> {
    let err = |msg: &str| CtError::Parse(format!("{msg} in polynomial `{src}`"));
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err("empty input"));
    }
    let mut pos = 0;
    let mut poly = Polynomial::zero();
    let read_uint = |pos: &mut usize| -> Option<String> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        (start < *pos).then(|| chars[start..*pos].iter().collect())
    };
    while pos < chars.len() {
        let mut negative = false;
        while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
            negative ^= chars[pos] == '-';
            pos += 1;
        }
        let mut coeff = T::one();
        let mut mono = Monomial::one();
        let mut first = true;
        loop {
            if !first {
                if pos < chars.len() && chars[pos] == '*' {
                    pos += 1;
                } else {
                    break;
                }
            }
            first = false;
            match chars.get(pos) {
                Some('x') => {
                    pos += 1;
                    let idx: usize = read_uint(&mut pos)
                        .ok_or_else(|| err("missing variable index"))?
                        .parse()
                        .map_err(|_| err("bad variable index"))?;
                    if idx == 0 {
                        return Err(err("variables are numbered from x1"));
                    }
                    let mut e = 1u32;
                    if chars.get(pos) == Some(&'^') {
                        pos += 1;
                        e = read_uint(&mut pos)
                            .ok_or_else(|| err("missing exponent"))?
                            .parse()
                            .map_err(|_| err("bad exponent"))?;
                    }
                    mono = mono.mul(&Monomial::var_pow(idx - 1, e));
                }
                Some(c) if c.is_ascii_digit() => {
                    let num = read_uint(&mut pos).expect("digit present");
                    let mut text = num;
                    if chars.get(pos) == Some(&'/') {
                        pos += 1;
                        let den = read_uint(&mut pos).ok_or_else(|| err("missing denominator"))?;
                        text = format!("{text}/{den}");
                    }
                    let value = T::parse_literal(&text).ok_or_else(|| err("bad coefficient"))?;
                    coeff = coeff * value;
                }
                _ => return Err(err("expected a coefficient or variable")),
            }
        }
        if pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
            return Err(err(&format!("unexpected `{}`", chars[pos])));
        }
        poly.add_term(mono, if negative { -coeff } else { coeff });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;

    type P = Polynomial<Rational>;

    fn p(s: &str) -> P {
        parse_poly(s).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p("x1 + 1") + &p("-x1"), P::one());
        assert_eq!(&P::zero() + &p("1 - x1"), p("1 - x1"));
        assert_eq!((&p("1 - x1") + &p("1 - x2")).to_string(), "2 - x1 - x2");
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p("x2 - x1") * &p("x2 + x1"), p("x2^2 - x1^2"));
        assert_eq!(&p("3 - x1*x2") * &P::one(), p("3 - x1*x2"));
        assert_eq!((&p("1 - x1") * &p("1 - x1")).to_string(), "1 - 2*x1 + x1^2");
        assert_eq!(p("1 - x1").pow(2), p("1 - 2*x1 + x1^2"));
    }

    #[test]
    fn coeff_of_examples() {
        assert_eq!(p("1 - x1 - x2").coeff_of(0, 1), p("-1"));
        assert_eq!(p("1 - x1 - x2").coeff_of(0, 0), p("1 - x2"));
        assert_eq!(p("x2^2 - x1^2").coeff_of(0, 2), p("-1"));
        assert!(p("x2^2 - x1^2").coeff_of(0, 1).is_zero());
    }

    #[test]
    fn eval_examples() {
        let c = Complex64::new;
        assert!((p("1 - x1").eval_complex(&[c(0.5, 0.0)]) - c(0.5, 0.0)).norm() < 1e-15);
        let v = p("x2 - x1").eval_complex(&[c(0.0, 0.01), c(0.0, 0.02)]);
        assert!((v - c(0.0, 0.01)).norm() < 1e-15);
        let v = p("x1*x2").eval_complex(&[c(1.0, 1.0), c(1.0, -1.0)]);
        assert!((v - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rendering_and_parsing() {
        let q = p("x1^2*x3 - 3/2*x2 + 7");
        assert_eq!(q.to_string(), "7 - 3/2*x2 + x1^2*x3");
        assert_eq!(p(&q.to_string()), q);
        assert_eq!(P::zero().to_string(), "0");
        assert_eq!(p("x3*x1").to_string(), "x1*x3");
        assert_eq!(p("x1 + x1 - 2*x1"), P::zero());
        for bad in ["", "x0", "1 +* x1", "y1", "x1^", "2/"] {
            assert!(parse_poly::<Rational>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn graded_order() {
        let ms: Vec<Monomial> = p("x2^2 + x1*x2 + x1^2 + x2 + x1 + 1").terms().map(|(m, _)| m.clone()).collect();
        let shown: Vec<String> = ms.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]);
    }

    #[test]
    fn helpers() {
        let q = p("x1^2*x2 + x1^3");
        assert_eq!(q.valuation_in(0), 2);
        assert_eq!(q.degree_in(0), 3);
        assert_eq!(q.unshift_var(0, 2), p("x2 + x1"));
        assert_eq!(q.unshift_var(0, 2).shift_var(0, 2), q);
        assert_eq!(p("2*x3").as_scaled_var(), Some((2, Rational::from_integer(2.into()))));
        assert_eq!(p("4 - 2*x1").ratio_to(&p("2 - x1")), Some(Rational::from_integer(2.into())));
        assert_eq!(p("4 - 2*x1").ratio_to(&p("2 + x1")), None);
        assert_eq!(q.variables(), vec![0, 1]);
        let parts = p("1 - x1 - x2 + x1*x2").split_by(0);
        assert_eq!(parts, vec![p("1 - x2"), p("-1 + x2")]);
    }

    #[test]
    fn float_coefficients() {
        let q: Polynomial<f64> = parse_poly("1 - x1").unwrap();
        assert_eq!((&q * &q).constant_term(), 1.0);
    }
}
