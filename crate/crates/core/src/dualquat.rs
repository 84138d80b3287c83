//! Dual quaternions over an arbitrary [`Scalar`] field.
//!
//! Coefficients are stored in the order `1, i, j, k, e, ei, ej, ek` where `e`
//! is the dual unit (`e^2 = 0`, central).

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands live in different scalar fields")]
    IncompatibleFields,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualQuaternion<S> {
    coeffs: [S; 8],
}

/// Hamilton product of two quaternions `[w, x, y, z]`.
fn quat_mul<S: Scalar>(a: &[S], b: &[S]) -> [S; 4] {
    let (a0, a1, a2, a3) = (&a[0], &a[1], &a[2], &a[3]);
    let (b0, b1, b2, b3) = (&b[0], &b[1], &b[2], &b[3]);
    let m = |x: &S, y: &S| x.clone() * y.clone();
    [
        m(a0, b0) - m(a1, b1) - m(a2, b2) - m(a3, b3),
        m(a0, b1) + m(a1, b0) + m(a2, b3) - m(a3, b2),
        m(a0, b2) - m(a1, b3) + m(a2, b0) + m(a3, b1),
        m(a0, b3) + m(a1, b2) - m(a2, b1) + m(a3, b0),
    ]
}

impl<S: Scalar> DualQuaternion<S> {
    pub fn new(coeffs: [S; 8]) -> Self {
        Self { coeffs }
    }

    pub fn from_parts(primal: [S; 4], dual: [S; 4]) -> Self {
        let [p0, p1, p2, p3] = primal;
        let [q0, q1, q2, q3] = dual;
        Self { coeffs: [p0, p1, p2, p3, q0, q1, q2, q3] }
    }

    pub fn zero() -> Self {
        Self { coeffs: std::array::from_fn(|_| S::zero()) }
    }

    pub fn one() -> Self {
        Self::scalar(S::one())
    }

    pub fn scalar(s: S) -> Self {
        let mut q = Self::zero();
        q.coeffs[0] = s;
        q
    }

    /// The basis element with index `k` (0-based, see module docs).
    pub fn unit(k: usize) -> Self {
        let mut q = Self::zero();
        q.coeffs[k] = S::one();
        q
    }

    /// `a + b*i` (rotation factor about the first axis).
    pub fn scalar_plus_i(a: S, b: S) -> Self {
        let mut q = Self::scalar(a);
        q.coeffs[1] = b;
        q
    }

    pub fn coeffs(&self) -> &[S; 8] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> [S; 8] {
        self.coeffs
    }

    pub fn primal(&self) -> &[S] {
        &self.coeffs[..4]
    }

    pub fn dual(&self) -> &[S] {
        &self.coeffs[4..]
    }

    pub fn map<T, F: Fn(&S) -> T>(&self, f: F) -> DualQuaternion<T> {
        DualQuaternion { coeffs: std::array::from_fn(|k| f(&self.coeffs[k])) }
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    /// `e * self`: the primal part moves into the dual slot.
    pub fn eps_shift(&self) -> Self {
        let mut q = Self::zero();
        for k in 0..4 {
            q.coeffs[k + 4] = self.coeffs[k].clone();
        }
        q
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.coeffs.iter().all(|a| other.coeffs.iter().all(|b| a.compatible(b)))
    }

    /// Product that reports field mismatches instead of panicking.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if !self.compatible(rhs) {
            return Err(AlgebraError::IncompatibleFields);
        }
        Ok(self.mul_ref(rhs))
    }

    pub fn mul_ref(&self, rhs: &Self) -> Self {
        let primal = quat_mul(self.primal(), rhs.primal());
        let cross1 = quat_mul(self.primal(), rhs.dual());
        let cross2 = quat_mul(self.dual(), rhs.primal());
        let [c0, c1, c2, c3] = cross1;
        let [d0, d1, d2, d3] = cross2;
        Self::from_parts(primal, [c0 + d0, c1 + d1, c2 + d2, c3 + d3])
    }

    /// Quaternion conjugate: negates the `i, j, k, ei, ej, ek` coefficients.
    pub fn quat_conjugate(&self) -> Self {
        let mut q = self.clone();
        for k in [1, 2, 3, 5, 6, 7] {
            q.coeffs[k] = -q.coeffs[k].clone();
        }
        q
    }

    /// `(primal, dual)` scalar parts of `self * conj(self)`.
    pub fn norm(&self) -> (S, S) {
        let n = self.mul_ref(&self.quat_conjugate());
        let [n0, _, _, _, n4, _, _, _] = n.coeffs;
        (n0, n4)
    }

    /// Squared Euclidean norm of the primal quaternion.
    pub fn primal_norm(&self) -> S {
        self.norm().0
    }

    /// The dual scalar of `self * conj(self)`; zero iff `self` lies on the
    /// Study quadric.
    pub fn study_defect(&self) -> S {
        self.norm().1
    }

    /// Whether `self` is a nonzero real scalar.
    ///
    /// In exact fields the test is exact and `tol` is ignored. Otherwise the
    /// coefficients `i .. ek` must be at most `tol` times the largest
    /// coefficient magnitude, and the scalar coefficient must exceed it.
    pub fn is_real_nonzero(&self, tol: f64) -> bool {
        if S::EXACT {
            return !self.coeffs[0].is_zero() && self.coeffs[1..].iter().all(Scalar::is_zero);
        }
        let scale = self.max_magnitude();
        if !(scale > 0.0) {
            return false;
        }
        self.coeffs[0].magnitude() > tol * scale
            && self.coeffs[1..].iter().all(|c| c.magnitude() <= tol * scale)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

impl<S> Index<usize> for DualQuaternion<S> {
    type Output = S;
    fn index(&self, k: usize) -> &S {
        &self.coeffs[k]
    }
}

impl<S: Scalar> Mul for DualQuaternion<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<S: Scalar> Mul for &DualQuaternion<S> {
    type Output = DualQuaternion<S>;
    fn mul(self, rhs: Self) -> DualQuaternion<S> {
        self.mul_ref(rhs)
    }
}

impl<S: Scalar> Add for DualQuaternion<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut it = rhs.coeffs.into_iter();
        Self { coeffs: self.coeffs.map(|a| a + it.next().expect("eight coefficients")) }
    }
}

impl<S: Scalar> Sub for DualQuaternion<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for DualQuaternion<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.map(|c| -c) }
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for DualQuaternion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const UNITS: [&str; 8] = ["", "i", "j", "k", "e", "ei", "ej", "ek"];
        let mut first = true;
        for (c, unit) in self.coeffs.iter().zip(UNITS) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if unit.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c}){unit}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
