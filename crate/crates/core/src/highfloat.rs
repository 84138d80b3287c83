//! Binary floating point with a compile-time mantissa length.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::BigInt;
use num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

/// A float with `P` mantissa bits. Arithmetic rounds to nearest-even at `P`.
#[derive(Clone)]
pub struct HighFloat<const P: usize = 256>(BigFloat);

/// The default high-precision field.
pub type F256 = HighFloat<256>;

impl<const P: usize> HighFloat<P> {
    pub const PRECISION: usize = P;

    pub fn from_i64(v: i64) -> Self {
        Self(BigFloat::from_i64(v, P))
    }

    pub fn from_f64(v: f64) -> Self {
        Self(BigFloat::from_f64(v, P))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        CONSTS.with(|cc| Self(BigFloat::parse(&v.to_string(), Radix::Dec, P, RM, &mut cc.borrow_mut())))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_bigint(r.numer()) / Self::from_bigint(r.denom())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn sqrt_unchecked(&self) -> Self {
        Self(self.0.sqrt(P, RM))
    }

    /// `cot(deg/2)` with the angle given in degrees.
    pub fn cot_half_degrees(deg: &BigRational) -> Self {
        let deg = Self::from_rational(deg);
        CONSTS.with(|cc| {
            let cc = &mut cc.borrow_mut();
            let pi = cc.pi(P, RM);
            let half = deg.0.mul(&pi, P, RM).div(&BigFloat::from_i64(360, P), P, RM);
            let (s, c) = (half.sin(P, RM, cc), half.cos(P, RM, cc));
            Self(c.div(&s, P, RM))
        })
    }

    /// Nearest `f64` (up to a final rounding of the top mantissa word).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let Some(&top) = words.last() else {
            return 0.0;
        };
        if top == 0 {
            return 0.0;
        }
        let word_bits = Word::BITS as i32;
        let magnitude = (top as f64) * 2f64.powi(exp - word_bits);
        if sign == Sign::Neg {
            -magnitude
        } else {
            magnitude
        }
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // astro-float prints "[-]d.ddd...e[+-]x" at full precision
        let full = self.0.to_string();
        let (neg, body) = match full.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, full.as_str()),
        };
        let (mant, exp) = body.split_once('e').unwrap_or((body, "0"));
        let mut exp: i64 = exp.parse().unwrap_or(0);
        let mut ds: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
        ds.resize(ds.len().max(digits + 1), 0);
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let text: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
        format!("{}{}.{}e{}", if neg { "-" } else { "" }, &text[..1], &text[1..], exp)
    }
}

impl<const P: usize> PartialEq for HighFloat<P> {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl<const P: usize> PartialOrd for HighFloat<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl<const P: usize> fmt::Debug for HighFloat<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HighFloat<{P}>({})", self.0)
    }
}

impl<const P: usize> fmt::Display for HighFloat<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(30))
    }
}

impl<const P: usize> Add for HighFloat<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0.add(&rhs.0, P, RM))
    }
}

impl<const P: usize> Sub for HighFloat<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0.sub(&rhs.0, P, RM))
    }
}

impl<const P: usize> Mul for HighFloat<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0.mul(&rhs.0, P, RM))
    }
}

impl<const P: usize> Div for HighFloat<P> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self(self.0.div(&rhs.0, P, RM))
    }
}

impl<const P: usize> Neg for HighFloat<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.neg())
    }
}
