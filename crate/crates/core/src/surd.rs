//! Exact arithmetic in a quadratic field `Q(sqrt(n))`.
//!
//! A [`Surd`] is `a + b*sqrt(n)` with rational `a`, `b` and a squarefree
//! radicand `n > 1`. Values with `b = 0` are plain rationals and combine with
//! any radicand. Two values with different radicands belong to different
//! fields; combining them with the operators panics, and callers that cannot
//! rule this out should check [`Surd::compatible`] first.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurdError {
    #[error("square root of a negative number: {0}")]
    NegativeRadicand(String),
    #[error("malformed value token {token:?}: {reason}")]
    Parse { token: String, reason: &'static str },
}

/// `rational + coeff * sqrt(radicand)`.
///
/// Normal form: `coeff == 0` iff `radicand == 1`; otherwise `radicand` is
/// squarefree and greater than one. Derived equality relies on this.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    coeff: BigRational,
    radicand: BigInt,
}

impl Surd {
    pub fn from_integer(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self { rational: r, coeff: BigRational::zero(), radicand: BigInt::one() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// Builds `rational + coeff * sqrt(radicand)` and normalizes it.
    pub fn new(rational: BigRational, coeff: BigRational, radicand: BigInt) -> Result<Self, SurdError> {
        if radicand.is_negative() {
            return Err(SurdError::NegativeRadicand(radicand.to_string()));
        }
        if coeff.is_zero() || radicand.is_zero() {
            return Ok(Self::from_rational(rational));
        }
        let (square, free) = squarefree_split(&radicand);
        let coeff = coeff * BigRational::from_integer(square);
        if free.is_one() {
            Ok(Self::from_rational(rational + coeff))
        } else {
            Ok(Self { rational, coeff, radicand: free })
        }
    }

    /// `sqrt(r)` for a non-negative rational `r = p/q`, as `sqrt(p*q)/q`.
    pub fn sqrt_of_rational(r: &BigRational) -> Result<Self, SurdError> {
        if r.is_negative() {
            return Err(SurdError::NegativeRadicand(r.to_string()));
        }
        let den = r.denom().clone();
        let coeff = BigRational::new(BigInt::one(), den.clone());
        Self::new(BigRational::zero(), coeff, r.numer() * den)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeff.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    /// `(coeff, radicand)` when the value is irrational.
    pub fn irrational_part(&self) -> Option<(&BigRational, &BigInt)> {
        (!self.coeff.is_zero()).then_some((&self.coeff, &self.radicand))
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    /// Galois conjugate `a - b*sqrt(n)`.
    pub fn conjugate(&self) -> Self {
        Self { rational: self.rational.clone(), coeff: -self.coeff.clone(), radicand: self.radicand.clone() }
    }

    /// Field norm `a^2 - n b^2`, always rational.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.coeff * &self.coeff * BigRational::from_integer(self.radicand.clone())
    }

    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.coeff);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: the larger square wins
        let a2 = &self.rational * &self.rational;
        let b2n = &self.coeff * &self.coeff * BigRational::from_integer(self.radicand.clone());
        if a2 > b2n {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.coeff.is_zero() {
            return a;
        }
        let b = self.coeff.to_f64().unwrap_or(f64::NAN);
        let n = self.radicand.to_f64().unwrap_or(f64::NAN);
        a + b * n.sqrt()
    }

    fn common_radicand(&self, other: &Self) -> BigInt {
        assert!(
            self.compatible(other),
            "incompatible quadratic fields: sqrt({}) and sqrt({})",
            self.radicand,
            other.radicand
        );
        if self.is_rational() {
            other.radicand.clone()
        } else {
            self.radicand.clone()
        }
    }

    fn assemble(rational: BigRational, coeff: BigRational, radicand: BigInt) -> Self {
        if coeff.is_zero() {
            Self::from_rational(rational)
        } else {
            Self { rational, coeff, radicand }
        }
    }
}

fn sign_of(r: &BigRational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Splits `n > 0` as `k^2 * m` with `m` squarefree.
fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p * &p <= rest {
        let pp = &p * &p;
        while rest.is_multiple_of(&pp) {
            rest /= &pp;
            square *= &p;
        }
        if rest.is_multiple_of(&p) {
            rest /= &p;
            // p occurs to an odd power; keep one copy aside
            let (s, m) = squarefree_split(&rest);
            return (square * s, m * p);
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    // no prime factor below cbrt(rest): rest is 1, p, p*q or p^2
    let root = rest.sqrt();
    if &root * &root == rest && !rest.is_one() {
        (square * root, BigInt::one())
    } else {
        (square, rest)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum().cmp(&0)
    }
}

impl Add for Surd {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.common_radicand(&rhs);
        Self::assemble(self.rational + rhs.rational, self.coeff + rhs.coeff, n)
    }
}

impl Sub for Surd {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for Surd {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let n = self.common_radicand(&rhs);
        let nr = BigRational::from_integer(n.clone());
        let rational = &self.rational * &rhs.rational + &self.coeff * &rhs.coeff * nr;
        let coeff = &self.rational * &rhs.coeff + &self.coeff * &rhs.rational;
        Self::assemble(rational, coeff, n)
    }
}

impl Div for Surd {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        let norm = rhs.norm();
        let num = self * rhs.conjugate();
        Self::assemble(num.rational / norm.clone(), num.coeff / norm, num.radicand)
    }
}

impl Neg for Surd {
    type Output = Self;
    fn neg(self) -> Self {
        Self { rational: -self.rational, coeff: -self.coeff, radicand: self.radicand }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Surd {
    /// Writes the value in the parameter-file token grammar, e.g. `3/5`,
    /// `-20*sqrt(54083849)/51051` or `1/2+sqrt(3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return f.write_str(&fmt_rational(&self.rational));
        }
        let mut out = String::new();
        if !self.rational.is_zero() {
            out.push_str(&fmt_rational(&self.rational));
            out.push(if self.coeff.is_negative() { '-' } else { '+' });
        } else if self.coeff.is_negative() {
            out.push('-');
        }
        let num = self.coeff.numer().abs();
        if !num.is_one() {
            out.push_str(&format!("{num}*"));
        }
        out.push_str(&format!("sqrt({})", self.radicand));
        if !self.coeff.denom().is_one() {
            out.push_str(&format!("/{}", self.coeff.denom()));
        }
        f.write_str(&out)
    }
}

fn parse_err(token: &str, reason: &'static str) -> SurdError {
    SurdError::Parse { token: token.to_string(), reason }
}

/// Integer, decimal (optionally with exponent) or `p/q`.
fn parse_rational(s: &str, token: &str) -> Result<BigRational, SurdError> {
    if s.is_empty() {
        return Err(parse_err(token, "empty number"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_decimal(p, token)?;
        let q = parse_decimal(q, token)?;
        if q.is_zero() {
            return Err(parse_err(token, "zero denominator"));
        }
        return Ok(p / q);
    }
    parse_decimal(s, token)
}

fn parse_decimal(s: &str, token: &str) -> Result<BigRational, SurdError> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = body[pos + 1..].parse().map_err(|_| parse_err(token, "bad exponent"))?;
            (&body[..pos], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err(token, "missing digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(parse_err(token, "unexpected character"));
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| parse_err(token, "missing digits"))?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// `[a*]sqrt(n)[/m]` without a leading sign.
fn parse_surd_term(s: &str, token: &str) -> Result<(BigRational, BigInt), SurdError> {
    let start = s.find("sqrt(").ok_or_else(|| parse_err(token, "expected sqrt(...)"))?;
    let coeff = match &s[..start] {
        "" => BigRational::one(),
        prefix => {
            let a = prefix.strip_suffix('*').ok_or_else(|| parse_err(token, "expected '*' before sqrt"))?;
            parse_rational(a, token)?
        }
    };
    let inner_start = start + "sqrt(".len();
    let close = s[inner_start..].find(')').ok_or_else(|| parse_err(token, "unclosed sqrt("))? + inner_start;
    let radicand: BigInt = s[inner_start..close].parse().map_err(|_| parse_err(token, "radicand must be an integer"))?;
    let divisor = match &s[close + 1..] {
        "" => BigRational::one(),
        tail => {
            let m = tail.strip_prefix('/').ok_or_else(|| parse_err(token, "unexpected text after sqrt(...)"))?;
            parse_rational(m, token)?
        }
    };
    if divisor.is_zero() {
        return Err(parse_err(token, "zero denominator"));
    }
    Ok((coeff / divisor, radicand))
}

impl FromStr for Surd {
    type Err = SurdError;

    /// Parses the value grammar: an integer, a decimal, `p/q`, `sqrt(n)/m`
    /// or `a*sqrt(n)/m`, each optionally negated, plus the sum form
    /// `r + a*sqrt(n)/m` of a rational and a surd term.
    fn from_str(token: &str) -> Result<Self, SurdError> {
        let s: String = token.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = s.find("sqrt(") else {
            return Ok(Self::from_rational(parse_rational(&s, token)?));
        };
        // walk back over the coefficient to the sign that starts the surd term
        let head = &s[..pos];
        let coeff_start = head
            .rfind(|c: char| !(c.is_ascii_digit() || c == '.' || c == '*' || c == '/'))
            .map_or(0, |i| i + 1);
        let (rational_text, sign) = if coeff_start == 0 {
            ("", 1)
        } else {
            let sign_pos = coeff_start - 1;
            let sign = match &s[sign_pos..coeff_start] {
                "+" => 1,
                "-" => -1,
                _ => return Err(parse_err(token, "unexpected character")),
            };
            (&s[..sign_pos], sign)
        };
        let rational = match rational_text {
            "" => BigRational::zero(),
            text => parse_rational(text, token)?,
        };
        let (coeff, radicand) = parse_surd_term(&s[coeff_start..], token)?;
        let coeff = if sign < 0 { -coeff } else { coeff };
        Self::new(rational, coeff, radicand)
    }
}
