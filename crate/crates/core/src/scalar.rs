//! Scalar fields the algebra is parameterised over.
//!
//! Three real fields are provided: [`Surd`] (exact arithmetic in a single
//! quadratic extension of the rationals), `f64`, and [`HighFloat`] (binary
//! floating point with a compile-time mantissa length, 256 bits by default).
//! [`Cplx`] lifts any of them to complex numbers.
//!
//! Mixing fields is rejected at compile time: every generic container in this
//! crate holds a single scalar type, and moving between them goes through
//! explicit conversions such as [`Scalar::from_surd`].

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::highfloat::HighFloat;
use crate::surd::Surd;

/// A real field usable as the coefficient type of dual quaternions.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equality is decided exactly. Tolerances are ignored when set.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Promotes an exact value. Float fields round; `Surd` clones.
    fn from_surd(s: &Surd) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// Absolute value as an `f64`, used for tolerance decisions and reports.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Square root when it exists in the field.
    fn sqrt(&self) -> Option<Self>;

    /// `cot(deg/2)` for a twist angle given in degrees, if representable.
    fn cot_half_degrees(_deg: &BigRational) -> Option<Self> {
        None
    }

    /// Whether `self` and `other` live in the same field instance. Only
    /// [`Surd`] values with different radicands are incompatible.
    fn compatible(&self, _other: &Self) -> bool {
        true
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// True when `|self| <= tol * scale`, or exactly zero in exact fields.
    fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol * scale
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_surd(s: &Surd) -> Self {
        s.to_f64()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn cot_half_degrees(deg: &BigRational) -> Option<Self> {
        let half = Self::from_rational(deg).to_radians() / 2.0;
        Some(half.cos() / half.sin())
    }
}

impl Scalar for Surd {
    const EXACT: bool = true;

    fn zero() -> Self {
        Surd::from_integer(0)
    }
    fn one() -> Self {
        Surd::from_integer(1)
    }
    fn from_i64(v: i64) -> Self {
        Surd::from_integer(v)
    }
    fn from_rational(r: &BigRational) -> Self {
        Surd::from_rational(r.clone())
    }
    fn from_surd(s: &Surd) -> Self {
        s.clone()
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        Surd::to_f64(self)
    }
    fn sqrt(&self) -> Option<Self> {
        self.as_rational().and_then(|r| Surd::sqrt_of_rational(r).ok())
    }
    fn compatible(&self, other: &Self) -> bool {
        Surd::compatible(self, other)
    }
}

impl<const P: usize> Scalar for HighFloat<P> {
    const EXACT: bool = false;

    fn zero() -> Self {
        HighFloat::from_i64(0)
    }
    fn one() -> Self {
        HighFloat::from_i64(1)
    }
    fn from_i64(v: i64) -> Self {
        HighFloat::from_i64(v)
    }
    fn from_rational(r: &BigRational) -> Self {
        HighFloat::from_rational(r)
    }
    fn from_surd(s: &Surd) -> Self {
        let base = HighFloat::from_rational(s.rational_part());
        if s.irrational_part().is_none() {
            return base;
        }
        let coeff = HighFloat::from_rational(s.coefficient());
        let root = HighFloat::from_bigint(s.radicand()).sqrt_unchecked();
        base + coeff * root
    }
    fn is_zero(&self) -> bool {
        HighFloat::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        HighFloat::to_f64(self)
    }
    fn sqrt(&self) -> Option<Self> {
        (!self.is_negative()).then(|| self.sqrt_unchecked())
    }
    fn cot_half_degrees(deg: &BigRational) -> Option<Self> {
        Some(HighFloat::cot_half_degrees(deg))
    }
}

/// Complex number over a real [`Scalar`] field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cplx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cplx<S> {
    pub fn new(re: S, im: S) -> Self {
        Self { re, im }
    }

    pub fn real(re: S) -> Self {
        Self { re, im: S::zero() }
    }

    pub fn zero() -> Self {
        Self::real(S::zero())
    }

    pub fn one() -> Self {
        Self::real(S::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: S::zero(), im: S::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { re: self.re.clone() * k.clone(), im: self.im.clone() * k.clone() }
    }

    pub fn norm_sqr(&self) -> S {
        self.re.square() + self.im.square()
    }

    pub fn magnitude(&self) -> f64 {
        self.re.magnitude().hypot(self.im.magnitude())
    }

    pub fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl<S: Scalar> Add for Cplx<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<S: Scalar> Sub for Cplx<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl<S: Scalar> Mul for Cplx<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl<S: Scalar> Div for Cplx<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sqr();
        let num = self * rhs.conj();
        Self { re: num.re / den.clone(), im: num.im / den }
    }
}

impl<S: Scalar> Neg for Cplx<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl<S: Scalar + Display> Display for Cplx<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_multiplication_table() {
        let i = Cplx::<f64>::i();
        assert_eq!(i.clone() * i, Cplx::real(-1.0));
        let a = Cplx::new(1.0, 2.0);
        let b = Cplx::new(3.0, -1.0);
        assert_eq!(a.clone() * b.clone(), Cplx::new(5.0, 5.0));
        let q = (a.clone() * b.clone()) / b;
        assert!((q - a).magnitude() < 1e-15);
    }

    #[test]
    fn negligible_is_exact_for_exact_fields() {
        let tiny = Surd::from_rational(BigRational::new(1.into(), 1_000_000_000.into()));
        assert!(!tiny.is_negligible(1.0, 1.0));
        assert!(1e-12f64.is_negligible(1e-10, 1.0));
    }

    #[test]
    fn cot_half_of_right_angle_is_one() {
        let deg = BigRational::from_integer(90.into());
        assert!((f64::cot_half_degrees(&deg).unwrap() - 1.0).abs() < 1e-15);
        assert!(Surd::cot_half_degrees(&deg).is_none());
    }
}
