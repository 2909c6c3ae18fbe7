//! Exact arithmetic in the quotient ring
//! `T = Z[p, p^-1, q, q^-1] / ((p-1)(p-q), (q-1)(p-q))`
//! and in Laurent polynomials over it.
//!
//! Elements of `T` are kept in the normal form `f(q) + a·ε` with `ε = p - q`.
//! In `T` we have `ε² = 0` and `(q-1)·ε = 0`, so `q^m·ε = ε` and
//! `(f, a)·(g, b) = (f·g, f(1)·b + g(1)·a)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

/// Minimal commutative ring interface used by the generic Laurent and
/// determinant code.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
}

impl Ring for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
}

/// Sparse Laurent polynomial in one variable. Terms are sorted by exponent
/// and never carry a zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Laurent<R> {
    terms: Vec<(i32, R)>,
}

impl<R: Ring> Laurent<R> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(R::one())
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i32, c: R) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self {
                terms: vec![(exp, c)],
            }
        }
    }

    /// Builds a polynomial from arbitrary terms; repeated exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, R)>,
    {
        let mut terms: Vec<(i32, R)> = terms.into_iter().collect();
        terms.sort_by_key(|(e, _)| *e);
        Self::from_sorted(terms)
    }

    fn from_sorted(terms: Vec<(i32, R)>) -> Self {
        let mut out: Vec<(i32, R)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => lc.add_assign_ref(&c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(i32, R)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> R {
        match self.terms.binary_search_by_key(&exp, |(e, _)| *e) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => R::zero(),
        }
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.last().map(|(e, _)| *e)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_sorted(self.terms.iter().map(|(e, x)| (*e, x.mul_ref(c))).collect())
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let rhs = |c: &R| if negate_other { c.neg_ref() } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            if ea < eb {
                out.push((*ea, ca.clone()));
                i += 1;
            } else if eb < ea {
                out.push((*eb, rhs(cb)));
                j += 1;
            } else {
                let c = if negate_other {
                    ca.sub_ref(cb)
                } else {
                    ca.add_ref(cb)
                };
                if !c.is_zero() {
                    out.push((*ea, c));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(e, c)| (*e, rhs(c))));
        Self { terms: out }
    }
}

impl<R: Ring> Ring for Laurent<R> {
    fn zero() -> Self {
        Laurent::zero()
    }

    fn one() -> Self {
        Laurent::one()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn neg_ref(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg_ref())).collect(),
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let lo = self.terms[0].0 as i64 + other.terms[0].0 as i64;
        let hi = self.terms.last().unwrap().0 as i64 + other.terms.last().unwrap().0 as i64;
        let span = (hi - lo + 1) as usize;
        let pairs = self.terms.len() * other.terms.len();
        if span <= 4 * pairs + 64 {
            // dense accumulation over the exponent window
            let mut acc: Vec<Option<R>> = vec![None; span];
            for (ea, ca) in &self.terms {
                for (eb, cb) in &other.terms {
                    let idx = (*ea as i64 + *eb as i64 - lo) as usize;
                    let prod = ca.mul_ref(cb);
                    match &mut acc[idx] {
                        Some(c) => c.add_assign_ref(&prod),
                        slot => *slot = Some(prod),
                    }
                }
            }
            let terms = acc
                .into_iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    c.filter(|c| !c.is_zero())
                        .map(|c| ((i as i64 + lo) as i32, c))
                })
                .collect();
            Self { terms }
        } else {
            let mut prods = Vec::with_capacity(pairs);
            for (ea, ca) in &self.terms {
                for (eb, cb) in &other.terms {
                    prods.push((ea + eb, ca.mul_ref(cb)));
                }
            }
            Self::from_terms(prods)
        }
    }
}

macro_rules! forward_ops {
    ($t:ty $(, $g:ident)?) => {
        impl$(<$g: Ring>)? Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t { self.add_ref(&rhs) }
        }
        impl<'a $(, $g: Ring)?> Add<&'a $t> for &'a $t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t { self.add_ref(rhs) }
        }
        impl$(<$g: Ring>)? Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t { self.sub_ref(&rhs) }
        }
        impl<'a $(, $g: Ring)?> Sub<&'a $t> for &'a $t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t { self.sub_ref(rhs) }
        }
        impl$(<$g: Ring>)? Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t { self.mul_ref(&rhs) }
        }
        impl<'a $(, $g: Ring)?> Mul<&'a $t> for &'a $t {
            type Output = $t;
            fn mul(self, rhs: &$t) -> $t { self.mul_ref(rhs) }
        }
        impl$(<$g: Ring>)? Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { self.neg_ref() }
        }
    };
}

forward_ops!(Laurent<R>, R);
forward_ops!(RingT);

/// The two generators of `T`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Generator {
    P,
    Q,
}

/// Element of `T` in normal form `lau(q) + eps·(p - q)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct RingT {
    lau: Laurent<i64>,
    eps: i64,
}

impl RingT {
    pub fn new(lau: Laurent<i64>, eps: i64) -> Self {
        Self { lau, eps }
    }

    pub fn from_int(c: i64) -> Self {
        Self::new(Laurent::constant(c), 0)
    }

    /// `p - q`.
    pub fn epsilon() -> Self {
        Self::new(Laurent::zero(), 1)
    }

    pub fn q_pow(m: i32) -> Self {
        Self::new(Laurent::monomial(m, 1), 0)
    }

    /// `p^m = (q + ε)^m = q^m + m·q^(m-1)·ε = q^m + m·ε`.
    pub fn p_pow(m: i32) -> Self {
        Self::new(Laurent::monomial(m, 1), m as i64)
    }

    pub fn gen_power(generator: Generator, m: i32) -> Self {
        match generator {
            Generator::P => Self::p_pow(m),
            Generator::Q => Self::q_pow(m),
        }
    }

    pub fn lau(&self) -> &Laurent<i64> {
        &self.lau
    }

    pub fn eps(&self) -> i64 {
        self.eps
    }

    /// Value at `p = q = 1`; the `ε` part vanishes there.
    pub fn eval_pq1(&self) -> i64 {
        self.lau.terms().iter().map(|(_, c)| *c).sum()
    }

    /// Nonzero and vanishing at `p = q = 1`. Such an `x` is killed by `p - q`.
    pub fn is_zero_divisor(&self) -> bool {
        !Ring::is_zero(self) && self.eval_pq1() == 0
    }

    /// Multiplies by `q^r`; only the `q`-part moves since `q^r·ε = ε`.
    pub fn mul_q_power(&self, r: i32) -> Self {
        Self::new(self.lau.shift(r), self.eps)
    }
}

impl Ring for RingT {
    fn zero() -> Self {
        Self::new(Laurent::zero(), 0)
    }

    fn one() -> Self {
        Self::from_int(1)
    }

    fn is_zero(&self) -> bool {
        self.lau.is_zero() && self.eps == 0
    }

    fn add_ref(&self, other: &Self) -> Self {
        Self::new(self.lau.add_ref(&other.lau), self.eps + other.eps)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        Self::new(self.lau.sub_ref(&other.lau), self.eps - other.eps)
    }

    fn neg_ref(&self) -> Self {
        Self::new(self.lau.neg_ref(), -self.eps)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let eps = self.eval_pq1() * other.eps + other.eval_pq1() * self.eps;
        Self::new(self.lau.mul_ref(&other.lau), eps)
    }
}

/// Laurent polynomial in `s` with coefficients in `T`.
pub type ZetaPolynomial = Laurent<RingT>;

/// Outcome of comparing two polynomials up to a power of `q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QPowerRelation {
    /// `y = q^r · x`.
    Equal(i32),
    NotEqual,
}

impl Laurent<RingT> {
    /// Largest exponent of `s` with a nonzero coefficient.
    pub fn top_degree(&self) -> Option<i32> {
        self.max_exp()
    }

    pub fn mul_q_power(&self, r: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, c.mul_q_power(r)))
                .collect(),
        }
    }

    /// Decides whether `other = q^r · self` for some integer `r`.
    ///
    /// When neither side has a `q`-part the power is not determined (`q^r`
    /// fixes `ε`) and `Equal(0)` is reported.
    pub fn equal_up_to_q_power(&self, other: &Self) -> QPowerRelation {
        let anchor = self.terms.iter().find(|(_, c)| !c.lau.is_zero());
        let Some((exp, coef)) = anchor else {
            if other.terms.iter().any(|(_, c)| !c.lau.is_zero()) {
                return QPowerRelation::NotEqual;
            }
            return if self == other {
                QPowerRelation::Equal(0)
            } else {
                QPowerRelation::NotEqual
            };
        };
        let theirs = other.coeff(*exp);
        let (Some(a), Some(b)) = (coef.lau.min_exp(), theirs.lau.min_exp()) else {
            return QPowerRelation::NotEqual;
        };
        let r = b - a;
        if &self.mul_q_power(r) == other {
            QPowerRelation::Equal(r)
        } else {
            QPowerRelation::NotEqual
        }
    }
}

fn write_signed(f: &mut fmt::Formatter<'_>, first: bool, c: i64, body: &str) -> fmt::Result {
    if first {
        write!(f, "{c}*{body}")
    } else if c < 0 {
        write!(f, " - {}*{body}", -(c as i128))
    } else {
        write!(f, " + {c}*{body}")
    }
}

impl fmt::Display for RingT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Ring::is_zero(self) {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.lau.terms() {
            write_signed(f, first, *c, &format!("q^{e}"))?;
            first = false;
        }
        if self.eps != 0 {
            write_signed(f, first, self.eps, "(p-q)")?;
        }
        Ok(())
    }
}

impl fmt::Display for Laurent<RingT> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*s^{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse `{input}`: {reason}")]
pub struct RenderParseError {
    input: String,
    reason: &'static str,
}

fn parse_err(input: &str, reason: &'static str) -> RenderParseError {
    RenderParseError {
        input: input.to_string(),
        reason,
    }
}

impl FromStr for RingT {
    type Err = RenderParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(RingT::zero());
        }
        let mut scan = Scanner {
            rest: &compact,
            whole: input,
        };
        let mut out = RingT::zero();
        let mut first = true;
        while !scan.rest.is_empty() {
            let negative = scan.rest.starts_with('-');
            if negative || scan.rest.starts_with('+') {
                scan.rest = &scan.rest[1..];
            } else if !first {
                return Err(parse_err(input, "expected `+` or `-` between monomials"));
            }
            first = false;
            let mut coef = scan.integer()?;
            if negative {
                coef = -coef;
            }
            scan.expect("*")?;
            if let Some(rest) = scan.rest.strip_prefix("(p-q)") {
                scan.rest = rest;
                out = out + RingT::new(Laurent::zero(), coef);
            } else {
                scan.expect("q^")?;
                let negative_exp = scan.rest.starts_with('-');
                if negative_exp {
                    scan.rest = &scan.rest[1..];
                }
                let exp = scan.integer()?;
                let exp = i32::try_from(if negative_exp { -exp } else { exp })
                    .map_err(|_| parse_err(input, "exponent out of range"))?;
                out = out + RingT::new(Laurent::monomial(exp, coef), 0);
            }
        }
        Ok(out)
    }
}

struct Scanner<'a> {
    rest: &'a str,
    whole: &'a str,
}

impl Scanner<'_> {
    fn integer(&mut self) -> Result<i64, RenderParseError> {
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(parse_err(self.whole, "expected digits"));
        }
        let value = self.rest[..end]
            .parse()
            .map_err(|_| parse_err(self.whole, "integer out of range"))?;
        self.rest = &self.rest[end..];
        Ok(value)
    }

    fn expect(&mut self, lit: &str) -> Result<(), RenderParseError> {
        self.rest = self
            .rest
            .strip_prefix(lit)
            .ok_or_else(|| parse_err(self.whole, "unexpected symbol"))?;
        Ok(())
    }
}

impl FromStr for Laurent<RingT> {
    type Err = RenderParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let trimmed = input.trim();
        if trimmed == "0" {
            return Ok(Laurent::zero());
        }
        let mut terms = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| parse_err(input, "expected `(`"))?;
            let close = body
                .find(')')
                .ok_or_else(|| parse_err(input, "unbalanced parenthesis"))?;
            // `(p-q)` nests one level inside the coefficient
            let close = nested_close(body).unwrap_or(close);
            let coef: RingT = body[..close].parse()?;
            let after = body[close + 1..].trim_start();
            let after = after
                .strip_prefix("*s^")
                .ok_or_else(|| parse_err(input, "expected `*s^`"))?;
            let exp_end = after
                .find(|c: char| c.is_whitespace())
                .unwrap_or(after.len());
            let exp = after[..exp_end]
                .parse()
                .map_err(|_| parse_err(input, "bad exponent"))?;
            terms.push((exp, coef));
            rest = after[exp_end..].trim_start();
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
            } else if !rest.is_empty() {
                return Err(parse_err(input, "expected ` + ` between terms"));
            }
        }
        Ok(Laurent::from_terms(terms))
    }
}

fn nested_close(body: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' if depth == 0 => return Some(i),
            ')' => depth -= 1,
            _ => {}
        }
    }
    None
}
