//! Quad polynomials and the far-connection bound.
//!
//! For each joint `i` there are two monic complex quadratics `Q_i^+` and
//! `Q_i^-` whose coefficients are explicit polynomials in the Bennett ratios,
//! twist cosines and offsets of joints `i, i+1, i+2`. A far connection of
//! joints `k` and `k+3` forces a common root of `Q_k^+` and `Q_{k+3}^+` (or of
//! the minus pair); a double connection forces equality.

use std::fmt;

use serde::Serialize;

use crate::linkage::{LinkageParams, JOINTS};
use crate::scalar::{Cplx, Scalar};

/// Which of the two quad polynomials of a joint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadSign {
    Plus,
    Minus,
}

impl QuadSign {
    pub const BOTH: [QuadSign; 2] = [QuadSign::Plus, QuadSign::Minus];

    pub fn symbol(self) -> char {
        match self {
            QuadSign::Plus => '+',
            QuadSign::Minus => '-',
        }
    }
}

impl fmt::Display for QuadSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadSign::Plus => "plus",
            QuadSign::Minus => "minus",
        })
    }
}

/// The parameters quad polynomials depend on: `b`, `c` and `s` per joint.
///
/// Kept separate from [`LinkageParams`] because the minus polynomials are
/// defined by a formal sign substitution that need not correspond to a
/// geometric linkage.
#[derive(Clone, Debug, PartialEq)]
pub struct BennettData<S> {
    pub b: [S; 6],
    pub c: [S; 6],
    pub s: [S; 6],
}

impl<S: Scalar> BennettData<S> {
    pub fn new(b: [S; 6], c: [S; 6], s: [S; 6]) -> Self {
        Self { b, c, s }
    }

    pub fn from_params(p: &LinkageParams<S>) -> Self {
        Self { b: p.b_all().clone(), c: p.c_all().clone(), s: p.s_all().clone() }
    }

    /// Negates every `b` and `c` and the offsets of joints 2, 4 and 6.
    pub fn negated(&self) -> Self {
        Self {
            b: self.b.clone().map(|v| -v),
            c: self.c.clone().map(|v| -v),
            s: std::array::from_fn(|k| if k % 2 == 1 { -self.s[k].clone() } else { self.s[k].clone() }),
        }
    }

    /// Renumbers joints so that joint `1 + k` becomes joint `1`.
    pub fn shifted(&self, k: usize) -> Self {
        let rot = |arr: &[S; 6]| -> [S; 6] { std::array::from_fn(|j| arr[(j + k) % JOINTS].clone()) };
        Self { b: rot(&self.b), c: rot(&self.c), s: rot(&self.s) }
    }

    /// `Q_i^+` evaluated on this data.
    pub fn quad(&self, joint: usize) -> QuadPoly<S> {
        assert!((1..=JOINTS).contains(&joint), "joint index {joint} out of range 1..=6");
        let k = |offset: usize| (joint - 1 + offset) % JOINTS;
        let (b1, b2, b3) = (self.b[k(0)].clone(), self.b[k(1)].clone(), self.b[k(2)].clone());
        let c1 = self.c[k(0)].clone();
        let (c2, c3) = (self.c[k(1)].clone(), self.c[k(2)].clone());
        let (s1, s2, s3) = (self.s[k(0)].clone(), self.s[k(1)].clone(), self.s[k(2)].clone());
        let two = S::from_i64(2);
        let four = S::from_i64(4);

        // (x + shift)^2 with shift = (b3 c3 - b1 c1)/2 - (s1/2) i
        let shift = Cplx::new((b3.clone() * c3 - b1.clone() * c1) / two.clone(), -s1.half());
        let a1 = shift.scale(&two);
        let imaginary = (b1.clone() * s2.clone()
            + b3.clone() * s3.clone()
            + s2.clone() * b3.clone() * c2.clone()
            + s3.clone() * b1.clone() * c2.clone())
            / two.clone();
        let cross = (b1.clone() * b3.clone() * c2.clone() - s2.clone() * s3.clone() * c2.clone()) / two;
        let squares = (s2.square() + s3.square() - b1.square() + b2.square() - b3.square()
            - b2.square() * c2.square())
            / four;
        let a0 = shift.square() + Cplx::new(squares - cross, imaginary);
        QuadPoly { a1, a0 }
    }

    pub fn quad_signed(&self, joint: usize, sign: QuadSign) -> QuadPoly<S> {
        match sign {
            QuadSign::Plus => self.quad(joint),
            QuadSign::Minus => self.negated().quad(joint),
        }
    }
}

/// Monic quadratic `x^2 + a1 x + a0` over the complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadPoly<S> {
    pub a1: Cplx<S>,
    pub a0: Cplx<S>,
}

impl<S: Scalar> QuadPoly<S> {
    pub fn new(a1: Cplx<S>, a0: Cplx<S>) -> Self {
        Self { a1, a0 }
    }

    /// `(x - r1)(x - r2)`.
    pub fn from_roots(r1: Cplx<S>, r2: Cplx<S>) -> Self {
        Self { a1: -(r1.clone() + r2.clone()), a0: r1 * r2 }
    }

    pub fn eval(&self, x: &Cplx<S>) -> Cplx<S> {
        x.square() + self.a1.clone() * x.clone() + self.a0.clone()
    }

    /// Root-size bound `max(1, |a1|, sqrt|a0|)` used to make tolerances
    /// relative.
    pub fn root_scale(&self) -> f64 {
        1f64.max(self.a1.magnitude()).max(self.a0.magnitude().sqrt())
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for QuadPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^2 + [{}] x + [{}]", self.a1, self.a0)
    }
}

pub fn quad_plus<S: Scalar>(p: &LinkageParams<S>, joint: usize) -> QuadPoly<S> {
    BennettData::from_params(p).quad(joint)
}

pub fn quad_minus<S: Scalar>(p: &LinkageParams<S>, joint: usize) -> QuadPoly<S> {
    BennettData::from_params(p).negated().quad(joint)
}

pub fn quad<S: Scalar>(p: &LinkageParams<S>, joint: usize, sign: QuadSign) -> QuadPoly<S> {
    BennettData::from_params(p).quad_signed(joint, sign)
}

fn determinant<S: Scalar>(m: &[Vec<Cplx<S>>]) -> Cplx<S> {
    match m.len() {
        0 => Cplx::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Cplx::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Cplx<S>>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][col].clone() * determinant(&minor);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Resultant of two monic quadratics as the determinant of their 4x4
/// Sylvester matrix. Expanding in floats cancels badly near a common root;
/// prefer [`resultant`].
pub fn sylvester_resultant<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>) -> Cplx<S> {
    let one = Cplx::one();
    let zero = Cplx::<S>::zero();
    let sylvester = vec![
        vec![one.clone(), p.a1.clone(), p.a0.clone(), zero.clone()],
        vec![zero.clone(), one.clone(), p.a1.clone(), p.a0.clone()],
        vec![one.clone(), q.a1.clone(), q.a0.clone(), zero.clone()],
        vec![zero, one, q.a1.clone(), q.a0.clone()],
    ];
    determinant(&sylvester)
}

/// Resultant of two monic quadratics, `(a0 - b0)^2 + (a1 - b1)(a1 b0 - a0 b1)`.
/// Equal to the Sylvester determinant, but built from coefficient
/// differences so it stays accurate when the quadratics nearly share a root.
pub fn resultant<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>) -> Cplx<S> {
    let d0 = p.a0.clone() - q.a0.clone();
    let d1 = p.a1.clone() - q.a1.clone();
    d0.square() + d1 * (p.a1.clone() * q.a0.clone() - p.a0.clone() * q.a1.clone())
}

/// Magnitude normalizer shared by the equality and resultant tests.
pub fn pair_scale<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>) -> f64 {
    p.root_scale().max(q.root_scale())
}

/// Relative distance between two monic quadratics; zero iff they coincide.
pub fn coefficient_distance<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>) -> f64 {
    let rho = pair_scale(p, q);
    let d1 = (p.a1.clone() - q.a1.clone()).magnitude() / rho;
    let d0 = (p.a0.clone() - q.a0.clone()).magnitude() / (rho * rho);
    d1.max(d0)
}

/// `|Res(p, q)|` divided by the fourth power of the pair scale.
pub fn relative_resultant<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>) -> f64 {
    resultant(p, q).magnitude() / pair_scale(p, q).powi(4)
}

/// Coefficient-wise equality, exact in exact fields.
pub fn quads_equal<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>, tol: f64) -> bool {
    if S::EXACT {
        p == q
    } else {
        coefficient_distance(p, q) <= tol
    }
}

pub fn resultant_vanishes<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>, tol: f64) -> bool {
    if S::EXACT {
        resultant(p, q).is_zero()
    } else {
        relative_resultant(p, q) <= tol
    }
}

/// Degree of `gcd(p, q)`: 2 when the quadratics coincide, 1 when they only
/// share a root, 0 otherwise. `tol` is relative and ignored in exact fields.
pub fn gcd_degree<S: Scalar>(p: &QuadPoly<S>, q: &QuadPoly<S>, tol: f64) -> u8 {
    if quads_equal(p, q, tol) {
        2
    } else if resultant_vanishes(p, q, tol) {
        1
    } else {
        0
    }
}

/// Upper bound on the connections of joints `k` and `k + 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FarBound {
    pub pair: usize,
    pub plus: u8,
    pub minus: u8,
}

impl FarBound {
    pub fn total(&self) -> u8 {
        self.plus + self.minus
    }
}

/// `gcd_degree(Q_k^+, Q_{k+3}^+) + gcd_degree(Q_k^-, Q_{k+3}^-)` for the far
/// pair `k` in `1..=3`.
pub fn far_bound<S: Scalar>(p: &LinkageParams<S>, pair: usize, tol: f64) -> FarBound {
    assert!((1..=3).contains(&pair), "far pair index {pair} out of range 1..=3");
    let data = BennettData::from_params(p);
    let degree = |sign| gcd_degree(&data.quad_signed(pair, sign), &data.quad_signed(pair + 3, sign), tol);
    FarBound { pair, plus: degree(QuadSign::Plus), minus: degree(QuadSign::Minus) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::Surd;

    fn q(n: i64, d: i64) -> Surd {
        Surd::from_ratio(n, d)
    }

    fn cq(re: Surd, im: Surd) -> Cplx<Surd> {
        Cplx::new(re, im)
    }

    fn real_quad(a1: i64, a0: i64) -> QuadPoly<Surd> {
        QuadPoly::new(Cplx::real(q(a1, 1)), Cplx::real(q(a0, 1)))
    }

    #[test]
    fn isolated_b2_term() {
        let zeros = || std::array::from_fn(|_| q(0, 1));
        let mut b = zeros();
        b[1] = q(2, 1);
        let data = BennettData::new(b, zeros(), zeros());
        assert_eq!(data.quad(1), real_quad(0, 1));
    }

    #[test]
    fn resultant_examples() {
        let p = real_quad(0, -1);
        assert!(resultant(&p, &p).is_zero());
        assert_eq!(resultant(&p, &real_quad(0, -4)), Cplx::real(q(9, 1)));
        assert!(resultant(&real_quad(-3, 2), &real_quad(-4, 3)).is_zero());
    }

    #[test]
    fn resultant_matches_closed_form() {
        let p = QuadPoly::new(cq(q(1, 2), q(-3, 1)), cq(q(2, 7), q(5, 3)));
        let r = QuadPoly::new(cq(q(-4, 1), q(1, 9)), cq(q(0, 1), q(-1, 2)));
        let da0 = p.a0.clone() - r.a0.clone();
        let da1 = p.a1.clone() - r.a1.clone();
        let closed = da0.square() + da1 * (p.a1.clone() * r.a0.clone() - p.a0.clone() * r.a1.clone());
        assert_eq!(resultant(&p, &r), closed);
        assert_eq!(sylvester_resultant(&p, &r), closed);
    }

    #[test]
    fn gcd_degree_cases() {
        let p = real_quad(0, -1);
        assert_eq!(gcd_degree(&p, &p, 0.0), 2);
        assert_eq!(gcd_degree(&p, &real_quad(-1, 0), 0.0), 1);
        assert_eq!(gcd_degree(&p, &real_quad(0, -4), 0.0), 0);
        let fp = QuadPoly::new(Cplx::real(0.0), Cplx::real(-1.0));
        let fq = QuadPoly::new(Cplx::real(1e-13), Cplx::real(-1.0));
        assert_eq!(gcd_degree(&fp, &fq, 1e-10), 2);
        // coefficients differ by 1e-13 but the resultant is 1e-26
        assert_eq!(gcd_degree(&fp, &fq, 1e-14), 1);
        assert_eq!(gcd_degree(&fp, &fq, 1e-30), 0);
    }

    #[test]
    fn negation_is_an_involution() {
        let data = BennettData::new(
            std::array::from_fn(|k| q(k as i64 + 1, 3)),
            std::array::from_fn(|k| q(1, k as i64 + 2)),
            std::array::from_fn(|k| q(2 * k as i64 - 5, 7)),
        );
        assert_eq!(data.negated().negated(), data);
        for i in 1..=6 {
            assert_eq!(data.negated().negated().quad(i), data.quad(i));
        }
    }
}
