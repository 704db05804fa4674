//! Exact arithmetic in `Q[u, u^-1]` and its fraction field, with `u = q^(1/2)`.
//!
//! Every order, volume, formal degree and gamma value in the crate is a
//! [`HalfLaurent`] or a [`RationalFunction`]. Coefficients are arbitrary
//! precision rationals; exponents are `i64` and overflow panics.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at the evaluation point")]
    Pole,
    #[error("odd power of u present; evaluate at u instead of q")]
    OddExponent,
    #[error("exponent overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("negative power of a non-monomial Laurent polynomial")]
    NotInvertible,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn add_exp(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("exponent overflow")
}

/// Laurent polynomial in `u`. Canonical: no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HalfLaurent {
    terms: BTreeMap<i64, BigRational>,
}

impl HalfLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(int(c))
    }

    pub fn monomial(c: BigRational, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    /// `u^k`
    pub fn u_pow(k: i64) -> Self {
        Self::monomial(BigRational::one(), k)
    }

    /// `q^k = u^(2k)`
    pub fn q_pow(k: i64) -> Self {
        Self::u_pow(k.checked_mul(2).expect("exponent overflow"))
    }

    pub fn u() -> Self {
        Self::u_pow(1)
    }

    pub fn q() -> Self {
        Self::u_pow(2)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, c);
        }
        out
    }

    /// Builds a polynomial in `q` from integer coefficients, lowest degree first.
    pub fn from_q_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (2 * i as i64, int(*c))),
        )
    }

    fn add_term(&mut self, k: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let e = self.terms.entry(k).or_insert_with(BigRational::zero);
            *e += c;
            e.is_zero()
        };
        if remove {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> BigRational {
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    /// True when every exponent is even, i.e. the value is a Laurent polynomial in `q`.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|k| k % 2 == 0)
    }

    /// Multiply by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (add_exp(*e, k), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Substitute `u -> u^m`.
    pub fn substitute_power(&self, m: i64) -> Self {
        // m = 0 merges every term, so go through from_terms
        Self::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (e.checked_mul(m).expect("exponent overflow"), c.clone())),
        )
    }

    /// Integer power. Negative powers only exist for monomials.
    pub fn pow(&self, e: i64) -> Result<Self, ArithError> {
        if e < 0 {
            if !self.is_monomial() {
                return Err(if self.is_zero() {
                    ArithError::DivisionByZero
                } else {
                    ArithError::NotInvertible
                });
            }
            let (k, c) = self.terms.iter().next().unwrap();
            let inv = Self::monomial(c.recip(), -k);
            return inv.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn eval_u(&self, u: &BigRational) -> Result<BigRational, ArithError> {
        if u.is_zero() && self.min_exp().is_some_and(|k| k < 0) {
            return Err(ArithError::Pole);
        }
        let mut acc = BigRational::zero();
        for (k, c) in &self.terms {
            acc += c * pow_rat(u, *k);
        }
        Ok(acc)
    }

    /// Evaluate at `q`, which requires every exponent to be even.
    pub fn eval_q(&self, q: &BigRational) -> Result<BigRational, ArithError> {
        if !self.is_even() {
            return Err(ArithError::OddExponent);
        }
        self.substitute_half().eval_u(q)
    }

    /// `u^(2k) -> u^k`; only meaningful on even values.
    fn substitute_half(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e / 2, c.clone())).collect(),
        }
    }

    /// Divide `self` by `d` exactly in `Q[u, u^-1]`, if possible.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (a, da) = self.to_poly();
        let (b, db) = d.to_poly();
        let (quo, rem) = poly_divmod(&a, &b);
        if !rem.is_empty() {
            return None;
        }
        Some(from_poly(&quo, da - db))
    }

    /// Split into a polynomial (constant term first) and the exponent of its constant term.
    fn to_poly(&self) -> (Vec<BigRational>, i64) {
        let Some(lo) = self.min_exp() else {
            return (Vec::new(), 0);
        };
        let hi = self.max_exp().unwrap();
        let mut v = vec![BigRational::zero(); (hi - lo) as usize + 1];
        for (k, c) in &self.terms {
            v[(k - lo) as usize] = c.clone();
        }
        (v, lo)
    }

    pub fn render_u(&self) -> String {
        render(self, "u", 1)
    }

    /// Render in powers of `q`; `None` when some exponent is odd.
    pub fn render_q(&self) -> Option<String> {
        if !self.is_even() {
            return None;
        }
        Some(render(&self.substitute_half(), "q", 1))
    }

    /// The `q`-rendering when available, otherwise the `u`-rendering.
    pub fn render_best(&self) -> String {
        self.render_q().unwrap_or_else(|| self.render_u())
    }
}

fn pow_rat(x: &BigRational, k: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

fn render(p: &HalfLaurent, var: &str, _unit: i64) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match *k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }
    out
}

impl fmt::Display for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_u())
    }
}

impl fmt::Debug for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HalfLaurent({})", self.render_u())
    }
}

impl FromStr for HalfLaurent {
    type Err = ArithError;

    /// Parses sums of terms `c`, `c*u^k`, `u^k`, `u`, with `q` allowed in place
    /// of `u` (meaning `u^2`). Coefficients may be written `a/b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| ArithError::Parse(format!("{m} in {s:?}"));
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty input"));
        }
        let mut out = HalfLaurent::zero();
        let bytes = cleaned.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = BigRational::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return Err(err("expected + or -"));
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                if bytes[i] == b'^' && i + 1 < bytes.len() && bytes[i + 1] == b'-' {
                    i += 2;
                    continue;
                }
                i += 1;
            }
            let term = &cleaned[start..i];
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coef, var) = match term.find(['u', 'q']) {
                None => (term, None),
                Some(p) => {
                    let c = &term[..p];
                    let c = c.strip_suffix('*').unwrap_or(c);
                    if !c.is_empty() && p > 0 && !term[..p].ends_with('*') {
                        return Err(err("missing * before variable"));
                    }
                    (c, Some(&term[p..]))
                }
            };
            let c = if coef.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coef).ok_or_else(|| err("bad coefficient"))?
            };
            let k = match var {
                None => 0,
                Some(v) => {
                    let scale = if v.starts_with('q') { 2 } else { 1 };
                    let rest = &v[1..];
                    let e = if rest.is_empty() {
                        1
                    } else {
                        let r = rest.strip_prefix('^').ok_or_else(|| err("bad exponent"))?;
                        r.parse::<i64>().map_err(|_| err("bad exponent"))?
                    };
                    e.checked_mul(scale).ok_or(ArithError::Overflow)?
                }
            };
            out.add_term(k, sign * c);
        }
        Ok(out)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.parse().ok()?;
            let b: BigInt = b.parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl Serialize for HalfLaurent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render_u())
    }
}

impl<'de> Deserialize<'de> for HalfLaurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Neg for HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        -&self
    }
}

impl Neg for &HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        HalfLaurent {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Add for &HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, -c.clone());
        }
        out
    }
}

impl Mul for &HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = HalfLaurent::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(add_exp(*a, *b), x * y);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { (&self).$m(&rhs) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t { (&self).$m(rhs) }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(HalfLaurent, Add add, Sub sub, Mul mul);

impl std::iter::Product for HalfLaurent {
    fn product<I: Iterator<Item = HalfLaurent>>(iter: I) -> Self {
        iter.fold(HalfLaurent::one(), |a, b| a * b)
    }
}

impl std::iter::Sum for HalfLaurent {
    fn sum<I: Iterator<Item = HalfLaurent>>(iter: I) -> Self {
        iter.fold(HalfLaurent::zero(), |a, b| a + b)
    }
}

// Dense polynomial helpers over Q, constant term first, no trailing zeros.

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn from_poly(v: &[BigRational], lo: i64) -> HalfLaurent {
    HalfLaurent::from_terms(
        v.iter()
            .enumerate()
            .map(|(i, c)| (add_exp(lo, i as i64), c.clone())),
    )
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    assert!(!b.is_empty(), "polynomial division by zero");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lb = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lb;
        for (i, bi) in b.iter().enumerate() {
            let t = &c * bi;
            r[shift + i] -= t;
        }
        q[shift] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divmod(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        for c in x.iter_mut() {
            *c /= &l;
        }
    }
    x
}

/// Quotient of two Laurent polynomials, kept in canonical form.
///
/// The denominator is a polynomial with nonzero constant term, integer
/// coefficients, content 1 and positive leading coefficient; numerator and
/// denominator are coprime. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: HalfLaurent,
    den: HalfLaurent,
}

impl RationalFunction {
    pub fn new(num: HalfLaurent, den: HalfLaurent) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::canonicalize(num, den))
    }

    pub fn from_laurent(p: HalfLaurent) -> Self {
        Self {
            num: p,
            den: HalfLaurent::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_laurent(HalfLaurent::zero())
    }

    pub fn one() -> Self {
        Self::from_laurent(HalfLaurent::one())
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_laurent(HalfLaurent::from_int(c))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_laurent(HalfLaurent::constant(c))
    }

    pub fn u_pow(k: i64) -> Self {
        Self::from_laurent(HalfLaurent::u_pow(k))
    }

    pub fn numerator(&self) -> &HalfLaurent {
        &self.num
    }

    pub fn denominator(&self) -> &HalfLaurent {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    fn canonicalize(num: HalfLaurent, den: HalfLaurent) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        // Move the power of u out of the denominator.
        let lo = den.min_exp().unwrap();
        let mut num = num.shift(-lo);
        let mut den = den.shift(-lo);
        if !den.is_monomial() && !num.is_monomial() {
            let (np, nlo) = num.to_poly();
            let (dp, _) = den.to_poly();
            let g = poly_gcd(&np, &dp);
            if g.len() > 1 {
                let (nq, _) = poly_divmod(&np, &g);
                let (dq, _) = poly_divmod(&dp, &g);
                num = from_poly(&nq, nlo);
                den = from_poly(&dq, 0);
            }
        }
        // Normalize the denominator to a primitive integer polynomial, lc > 0.
        let mut lcm_den = BigInt::one();
        for (_, c) in den.terms() {
            lcm_den = lcm_den.lcm(c.denom());
        }
        let mut factor = BigRational::from_integer(lcm_den);
        let mut content = BigInt::zero();
        for (_, c) in den.scale(&factor).terms() {
            content = content.gcd(c.numer());
        }
        factor /= BigRational::from_integer(content);
        if den.leading_coeff().unwrap().is_negative() {
            factor = -factor;
        }
        Self {
            num: num.scale(&factor),
            den: den.scale(&factor),
        }
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.num.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::canonicalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self, ArithError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let n = base.num.pow(e.abs())?;
        let d = base.den.pow(e.abs())?;
        // Powers of coprime polynomials stay coprime.
        Ok(Self { num: n, den: d })
    }

    pub fn eval_u(&self, u: &BigRational) -> Result<BigRational, ArithError> {
        let d = self.den.eval_u(u)?;
        if d.is_zero() {
            return Err(ArithError::Pole);
        }
        Ok(self.num.eval_u(u)? / d)
    }

    pub fn eval_q(&self, q: &BigRational) -> Result<BigRational, ArithError> {
        let d = self.den.eval_q(q)?;
        if d.is_zero() {
            return Err(ArithError::Pole);
        }
        Ok(self.num.eval_q(q)? / d)
    }

    pub fn is_even(&self) -> bool {
        self.num.is_even() && self.den.is_even()
    }

    pub fn render_u(&self) -> String {
        if self.den.is_one() {
            self.num.render_u()
        } else {
            format!("({})/({})", self.num.render_u(), self.den.render_u())
        }
    }

    pub fn render_q(&self) -> Option<String> {
        if self.den.is_one() {
            self.num.render_q()
        } else {
            Some(format!(
                "({})/({})",
                self.num.render_q()?,
                self.den.render_q()?
            ))
        }
    }

    pub fn render_best(&self) -> String {
        self.render_q().unwrap_or_else(|| self.render_u())
    }
}

impl From<HalfLaurent> for RationalFunction {
    fn from(p: HalfLaurent) -> Self {
        Self::from_laurent(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_u())
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self.render_u())
    }
}

impl FromStr for RationalFunction {
    type Err = ArithError;

    /// Accepts `p` or `(p)/(p)` with `p` in the [`HalfLaurent`] grammar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            if let Some(idx) = rest.find(")/(") {
                let num = &rest[..idx];
                let den = rest[idx + 3..]
                    .strip_suffix(')')
                    .ok_or_else(|| ArithError::Parse(format!("unbalanced parentheses in {s:?}")))?;
                return RationalFunction::new(num.parse()?, den.parse()?);
            }
        }
        Ok(RationalFunction::from_laurent(t.parse()?))
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render_u())
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::canonicalize(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::canonicalize(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_laurent(&self.num * &rhs.num);
        }
        RationalFunction::canonicalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero; use [`RationalFunction::checked_div`] to handle it.
impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("division by zero")
    }
}

forward_owned!(RationalFunction, Add add, Sub sub, Mul mul, Div div);

impl std::iter::Product for RationalFunction {
    fn product<I: Iterator<Item = RationalFunction>>(iter: I) -> Self {
        iter.fold(RationalFunction::one(), |a, b| a * b)
    }
}

/// Exact division of Laurent polynomials, promoting to a rational function.
pub fn laurent_div(a: &HalfLaurent, b: &HalfLaurent) -> Result<RationalFunction, ArithError> {
    RationalFunction::new(a.clone(), b.clone())
}

/// `x^z - 1` split into cyclotomic factors; returns `Phi_z(x)` in the variable `u^step`.
pub fn cyclotomic(z: u32, step: i64) -> HalfLaurent {
    assert!(z >= 1);
    let mut p = &HalfLaurent::u_pow(z as i64) - &HalfLaurent::one();
    for d in 1..z {
        if z % d == 0 {
            p = p
                .exact_div(&cyclotomic(d, 1))
                .expect("cyclotomic factor divides x^z - 1");
        }
    }
    p.substitute_power(step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hl(s: &str) -> HalfLaurent {
        s.parse().unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(hl("u^2 - 1") * hl("u^2 + 1"), hl("u^4 - 1"));
    }

    #[test]
    fn exact_cancellation_promotes() {
        let r = laurent_div(&hl("u^2 - 1"), &hl("u - 1")).unwrap();
        assert_eq!(r, RationalFunction::from_laurent(hl("u + 1")));
        assert!(r.is_laurent());
    }

    #[test]
    fn inverse_powers() {
        assert_eq!(hl("u^3") * hl("u^-3"), HalfLaurent::one());
        assert_eq!(hl("2*u^3").pow(-1).unwrap(), hl("1/2*u^-3"));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hl("u^2 - 1").eval_u(&int(2)).unwrap(), int(3));
        let p = hl("u^2 - 1").pow(2).unwrap() * hl("u^-12");
        assert_eq!(p.eval_q(&int(2)).unwrap(), rat(1, 64));
        let r = laurent_div(&HalfLaurent::one(), &hl("u^2 - 1")).unwrap();
        assert_eq!(r.eval_q(&int(1)), Err(ArithError::Pole));
    }

    #[test]
    fn odd_exponent_rejects_q() {
        assert_eq!(hl("u^3 + 1").eval_q(&int(4)), Err(ArithError::OddExponent));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            RationalFunction::new(HalfLaurent::one(), HalfLaurent::zero()),
            Err(ArithError::DivisionByZero)
        );
        assert!(RationalFunction::zero().recip().is_err());
    }

    #[test]
    fn canonical_denominator() {
        let r = RationalFunction::new(hl("u"), hl("-2*u^3 + 4*u")).unwrap();
        // u / (-2u(u^2 - 2)) = -1/2 / (u^2 - 2)
        assert_eq!(r.denominator(), &hl("u^2 - 2"));
        assert_eq!(r.numerator(), &hl("-1/2"));
    }

    #[test]
    fn render_and_parse_round_trip() {
        let p = hl("3*u^4 - u^2 + 1/2*u^-1 - 7");
        assert_eq!(p.render_u(), "3*u^4 - u^2 - 7 + 1/2*u^-1");
        assert_eq!(p.render_u().parse::<HalfLaurent>().unwrap(), p);
        let q = hl("q^2 - 1");
        assert_eq!(q.render_q().unwrap(), "q^2 - 1");
        assert_eq!(q.render_u(), "u^4 - 1");
        let r = laurent_div(&hl("u"), &hl("u^2 + 1")).unwrap();
        assert_eq!(r.render_u().parse::<RationalFunction>().unwrap(), r);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("u^".parse::<HalfLaurent>().is_err());
        assert!("".parse::<HalfLaurent>().is_err());
        assert!("2u".parse::<HalfLaurent>().is_err());
        assert!("1/0".parse::<HalfLaurent>().is_err());
    }

    #[test]
    fn cyclotomic_values() {
        assert_eq!(cyclotomic(1, 1), hl("u - 1"));
        assert_eq!(cyclotomic(2, 1), hl("u + 1"));
        assert_eq!(cyclotomic(3, 1), hl("u^2 + u + 1"));
        assert_eq!(cyclotomic(4, 2), hl("u^4 + 1"));
        assert_eq!(cyclotomic(6, 1), hl("u^2 - u + 1"));
    }
}
