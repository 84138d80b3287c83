//! Known mobile families of 6R linkages: exact sample generators and
//! membership tests against their defining equations.
//!
//! Generators draw free parameters as small random rationals and solve for
//! the remaining ones in closed form. A solved parameter may be a square root
//! of a rational, which stays exact in [`Surd`] arithmetic.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linkage::LinkageParams;
use crate::scalar::Scalar;
use crate::surd::Surd;

/// Draw budget of the rejection loop in [`sample`].
pub const MAX_DRAWS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("unknown builtin instance {0:?}")]
    UnknownBuiltin(String),
    #[error("no admissible {family} sample within {draws} draws")]
    Exhausted { family: Family, draws: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    LineSymmetric,
    Hooke,
    Dietmaier,
    DietmaierSecond,
    PlaneSymmetric,
    Orthogonal,
    NewFamily,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::LineSymmetric,
        Family::Hooke,
        Family::Dietmaier,
        Family::DietmaierSecond,
        Family::PlaneSymmetric,
        Family::Orthogonal,
        Family::NewFamily,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LineSymmetric => "line_symmetric",
            Family::Hooke => "hooke",
            Family::Dietmaier => "dietmaier",
            Family::DietmaierSecond => "dietmaier_second",
            Family::PlaneSymmetric => "plane_symmetric",
            Family::Orthogonal => "orthogonal",
            Family::NewFamily => "new_family",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// Parameter sets printed with worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// Bricard's line-symmetric linkage with rational data.
    BricardExample,
    /// A member of the family with no near connections and double far
    /// connections on every pair; its `w_5` is irrational.
    NewExample,
}

impl Builtin {
    pub const ALL: [Builtin; 2] = [Builtin::BricardExample, Builtin::NewExample];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::BricardExample => "bricard_example",
            Builtin::NewExample => "new_example",
        }
    }
}

impl FromStr for Builtin {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| FamilyError::UnknownBuiltin(s.to_string()))
    }
}

fn q(n: i64, d: i64) -> Surd {
    Surd::from_ratio(n, d)
}

pub fn builtin_instance(which: Builtin) -> LinkageParams<Surd> {
    match which {
        Builtin::BricardExample => {
            let d = [q(3, 5), q(24, 13), q(72, 25), q(3, 5), q(24, 13), q(72, 25)];
            let w = [q(1, 3), q(2, 3), q(3, 4), q(1, 3), q(2, 3), q(3, 4)];
            let s = [4, 5, 1, 4, 5, 1].map(|v| q(v, 1));
            LinkageParams::from_dsw(d, s, w).expect("printed data has no parallel axes")
        }
        Builtin::NewExample => {
            let b = [q(-1, 3), q(-61, 33), q(305, 429), q(2000, 1001), q(-2900, 1001), q(1740, 1001)];
            let w5: Surd = "sqrt(54083849)/6619".parse().expect("valid token");
            let w = [q(2, 3), q(-4, 1), q(6, 5), q(1, 2), w5, q(3, 7)];
            let s = [q(2, 3), q(0, 1), q(0, 1), q(2, 3), q(0, 1), q(0, 1)];
            LinkageParams::from_bsw(b, s, w).expect("printed data has no parallel axes")
        }
    }
}

/// One defining equation `value = 0`. `degree` is the homogeneity degree in
/// lengths, used to make float tolerances scale-free.
#[derive(Clone, Debug)]
struct Equation<S> {
    name: String,
    value: S,
    degree: i32,
}

fn eq<S>(name: impl Into<String>, value: S, degree: i32) -> Equation<S> {
    Equation { name: name.into(), value, degree }
}

fn dietmaier_equations<S: Scalar>(p: &LinkageParams<S>, second: bool) -> Vec<Equation<S>> {
    let (b, c, f, s) = (|i| p.b(i).clone(), |i| p.c(i).clone(), |i| p.f(i).clone(), |i| p.s(i).clone());
    let mut out = vec![
        eq("b6 - b1", b(6) - b(1), 1),
        eq("b3 - b4", b(3) - b(4), 1),
    ];
    if second {
        out.push(eq("b2 + b5", b(2) + b(5), 1));
    } else {
        out.push(eq("b2 - b5", b(2) - b(5), 1));
    }
    out.extend([
        eq("c2 - c5", c(2) - c(5), 0),
        eq("f6 + f1 - f3 - f4", f(6) + f(1) - f(3) - f(4), 1),
        eq("s6 - s2", s(6) - s(2), 1),
        eq("s3 - s5", s(3) - s(5), 1),
        eq("s1", s(1), 1),
        eq("s4", s(4), 1),
    ]);
    out
}

fn equations<S: Scalar>(p: &LinkageParams<S>, family: Family) -> Vec<Equation<S>> {
    let b = |i| p.b(i).clone();
    let c = |i| p.c(i).clone();
    let f = |i| p.f(i).clone();
    let s = |i| p.s(i).clone();
    let w = |i| p.w(i).clone();
    match family {
        Family::LineSymmetric => (1..=3)
            .flat_map(|i| {
                [
                    eq(format!("b{i} - b{}", i + 3), b(i) - b(i + 3), 1),
                    eq(format!("w{i} - w{}", i + 3), w(i) - w(i + 3), 0),
                    eq(format!("s{i} - s{}", i + 3), s(i) - s(i + 3), 1),
                ]
            })
            .collect(),
        Family::Hooke => {
            let side = |i: usize, j: usize| {
                s(i).square() + s(j).square() + b(i).square() - f(i).square()
                    + S::from_i64(2) * s(i) * s(j) * c(i)
            };
            vec![
                eq("b1", b(1), 1),
                eq("b3", b(3), 1),
                eq("b4", b(4), 1),
                eq("b6", b(6), 1),
                eq("s1", s(1), 1),
                eq("s4", s(4), 1),
                eq("sphere difference", side(2, 3) - side(5, 6), 2),
            ]
        }
        Family::Dietmaier => dietmaier_equations(p, false),
        Family::DietmaierSecond => dietmaier_equations(p, true),
        Family::PlaneSymmetric => {
            let mut out = dietmaier_equations(p, true);
            out.push(eq("f1 + f6", f(1) + f(6), 1));
            out
        }
        Family::Orthogonal => {
            let mut out: Vec<_> = (1..=6).map(|i| eq(format!("s{i}"), s(i), 1)).collect();
            out.extend((1..=6).map(|i| eq(format!("c{i}"), c(i), 0)));
            let odd = b(1).square() + b(3).square() + b(5).square();
            let even = b(2).square() + b(4).square() + b(6).square();
            out.push(eq("b1^2 + b3^2 + b5^2 - b2^2 - b4^2 - b6^2", odd - even, 2));
            out
        }
        Family::NewFamily => {
            let lhs = b(1).square() + b(3).square() + b(5).square() + f(6).square();
            let rhs = b(2).square() + b(4).square() + b(6).square() + f(3).square();
            vec![
                eq("b1^2 + b3^2 + b5^2 + f6^2 - b2^2 - b4^2 - b6^2 - f3^2", lhs - rhs, 2),
                eq("f2 + f3 - f5 - f6", f(2) + f(3) - f(5) - f(6), 1),
                eq("b2 c1 - b3", b(2) * c(1) - b(3), 1),
                eq("b2 c3 - b1", b(2) * c(3) - b(1), 1),
                eq("b5 c4 - b6", b(5) * c(4) - b(6), 1),
                eq("b5 c6 - b4", b(5) * c(6) - b(4), 1),
                eq("s2", s(2), 1),
                eq("s3", s(3), 1),
                eq("s5", s(5), 1),
                eq("s6", s(6), 1),
                eq("s1 - s4", s(1) - s(4), 1),
            ]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationResidual {
    pub equation: String,
    /// `|value| / L^degree` with `L` the linkage length scale.
    pub residual: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub family: Family,
    pub member: bool,
    pub residuals: Vec<EquationResidual>,
}

/// Checks the defining equations of `family`; exact in exact fields,
/// otherwise each residual is compared to `tol` after scaling.
pub fn membership<S: Scalar>(p: &LinkageParams<S>, family: Family, tol: f64) -> Membership {
    let scale = p.length_scale();
    let residuals: Vec<_> = equations(p, family)
        .into_iter()
        .map(|e| {
            let norm = scale.powi(e.degree);
            EquationResidual {
                residual: e.value.magnitude() / norm,
                holds: e.value.is_negligible(tol, norm),
                equation: e.name,
            }
        })
        .collect();
    Membership { family, member: residuals.iter().all(|r| r.holds), residuals }
}

/// Every family whose equations `p` satisfies.
pub fn families_of<S: Scalar>(p: &LinkageParams<S>, tol: f64) -> Vec<Family> {
    Family::ALL.into_iter().filter(|&f| membership(p, f, tol).member).collect()
}

struct Draw<'a> {
    rng: &'a mut ChaCha8Rng,
}

impl Draw<'_> {
    /// `+-n/d` with `1 <= n, d <= 9`.
    fn nonzero(&mut self) -> Surd {
        let n: i64 = self.rng.gen_range(1..=9);
        let d: i64 = self.rng.gen_range(1..=9);
        let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
        q(sign * n, d)
    }

    fn sign(&mut self) -> Surd {
        q(if self.rng.gen_bool(0.5) { 1 } else { -1 }, 1)
    }
}

fn cosine(w: &Surd) -> Surd {
    let w2 = w.square();
    (w2.clone() - Surd::one()) / (w2 + Surd::one())
}

fn sine(w: &Surd) -> Surd {
    Surd::from_i64(2) * w.clone() / (w.square() + Surd::one())
}

/// Positive `w` with the given cosine, if `|c| < 1` and `c` is rational.
fn cot_from_cosine(c: &Surd) -> Option<Surd> {
    let one = Surd::one();
    if c.abs() >= one {
        return None;
    }
    let ratio = (one.clone() + c.clone()) / (one - c.clone());
    Scalar::sqrt(&ratio)
}

fn zeros() -> [Surd; 6] {
    std::array::from_fn(|_| Surd::zero())
}

fn draw_once(family: Family, rng: &mut Draw<'_>) -> Option<LinkageParams<Surd>> {
    match family {
        Family::LineSymmetric => {
            let b: [Surd; 3] = std::array::from_fn(|_| rng.nonzero());
            let w: [Surd; 3] = std::array::from_fn(|_| rng.nonzero());
            let s: [Surd; 3] = std::array::from_fn(|_| rng.nonzero());
            let rep = |a: &[Surd; 3]| -> [Surd; 6] { std::array::from_fn(|k| a[k % 3].clone()) };
            LinkageParams::from_bsw(rep(&b), rep(&s), rep(&w)).ok()
        }
        Family::Hooke => {
            let w: [Surd; 6] = std::array::from_fn(|_| rng.nonzero());
            let (b2, b5) = (rng.nonzero(), rng.nonzero());
            let (s2, s3, s5) = (rng.nonzero(), rng.nonzero(), rng.nonzero());
            let (c2, c5) = (cosine(&w[1]), cosine(&w[4]));
            let f2 = b2.clone() * c2.clone();
            let lhs = s2.square() + s3.square() + b2.square() - f2.square()
                + Surd::from_i64(2) * s2.clone() * s3.clone() * c2;
            // s6^2 + 2 s5 c5 s6 + (s5^2 + b5^2 - f5^2 - lhs) = 0
            let disc = lhs - (s5.square() + b5.square()) * (Surd::one() - c5.square());
            if disc.signum() <= 0 {
                return None;
            }
            let s6 = -(s5.clone() * c5) + Scalar::sqrt(&disc)?;
            let mut b = zeros();
            b[1] = b2;
            b[4] = b5;
            let s = [Surd::zero(), s2, s3, Surd::zero(), s5, s6];
            LinkageParams::from_bsw(b, s, w).ok()
        }
        Family::Dietmaier | Family::DietmaierSecond => {
            let w1 = rng.nonzero();
            let w2 = rng.nonzero();
            let w3 = rng.nonzero();
            let w4 = rng.nonzero();
            let (b1, b2, b3) = (rng.nonzero(), rng.nonzero(), rng.nonzero());
            let (c1, c3, c4) = (cosine(&w1), cosine(&w3), cosine(&w4));
            let c6 = (b3.clone() * (c3 + c4) - b1.clone() * c1) / b1.clone();
            let w6 = cot_from_cosine(&c6)?;
            let b5 = if family == Family::Dietmaier { b2.clone() } else { -b2.clone() };
            let (s2, s3) = (rng.nonzero(), rng.nonzero());
            let b = [b1.clone(), b2, b3.clone(), b3, b5, b1];
            let s = [Surd::zero(), s2.clone(), s3.clone(), Surd::zero(), s3, s2];
            let w = [w1, w2.clone(), w3, w4, w2, w6];
            LinkageParams::from_bsw(b, s, w).ok()
        }
        Family::PlaneSymmetric => {
            let (w1, w2, w3) = (rng.nonzero(), rng.nonzero(), rng.nonzero());
            let (b1, b2, b3) = (rng.nonzero(), rng.nonzero(), rng.nonzero());
            let (s2, s3) = (rng.nonzero(), rng.nonzero());
            // c4 = -c3 and c6 = -c1
            let w4 = Surd::one() / w3.clone();
            let w6 = Surd::one() / w1.clone();
            let b = [b1.clone(), b2.clone(), b3.clone(), b3, -b2, b1];
            let s = [Surd::zero(), s2.clone(), s3.clone(), Surd::zero(), s3, s2];
            let w = [w1, w2.clone(), w3, w4, w2, w6];
            LinkageParams::from_bsw(b, s, w).ok()
        }
        Family::Orthogonal => {
            let b: [Surd; 5] = std::array::from_fn(|_| rng.nonzero());
            let sq = b[0].square() + b[2].square() + b[4].square() - b[1].square() - b[3].square();
            if sq.signum() <= 0 {
                return None;
            }
            let b6 = Scalar::sqrt(&sq)?;
            let b = [b[0].clone(), b[1].clone(), b[2].clone(), b[3].clone(), b[4].clone(), b6];
            let w: [Surd; 6] = std::array::from_fn(|_| rng.sign());
            LinkageParams::from_bsw(b, zeros(), w).ok()
        }
        Family::NewFamily => {
            let w1 = rng.nonzero();
            let w2 = rng.nonzero();
            let w3 = rng.nonzero();
            let w4 = rng.nonzero();
            let w6 = rng.nonzero();
            let b2 = rng.nonzero();
            let s1 = rng.nonzero();
            let (c1, c2, c3, c4, c6) = (cosine(&w1), cosine(&w2), cosine(&w3), cosine(&w4), cosine(&w6));
            let b3 = b2.clone() * c1.clone();
            let b1 = b2.clone() * c3.clone();
            // the quadratic identity forces |b5 sin4 sin6| = |b2 sin1 sin3|
            let b5 = b2.clone() * sine(&w1) * sine(&w3) / (sine(&w4) * sine(&w6));
            let b4 = b5.clone() * c6.clone();
            let b6 = b5.clone() * c4.clone();
            let c5 = (b2.clone() * c2 + b3.clone() * c3) / b5.clone() - c4 * c6;
            let w5 = cot_from_cosine(&c5)?;
            let b = [b1, b2, b3, b4, b5, b6];
            let s = [s1.clone(), Surd::zero(), Surd::zero(), s1, Surd::zero(), Surd::zero()];
            let w = [w1, w2, w3, w4, w5, w6];
            LinkageParams::from_bsw(b, s, w).ok()
        }
    }
}

fn forced_zero_b(family: Family, joint: usize) -> bool {
    family == Family::Hooke && matches!(joint, 1 | 3 | 4 | 6)
}

fn admissible(family: Family, p: &LinkageParams<Surd>) -> bool {
    let b_ok = (1..=6).all(|i| forced_zero_b(family, i) || !p.b(i).is_zero());
    let c_ok = p.c_all().iter().all(|c| c.abs() < Surd::one());
    b_ok && c_ok
}

/// A deterministic exact member of `family` for the given seed.
pub fn sample(family: Family, seed: u64) -> Result<LinkageParams<Surd>, FamilyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = Draw { rng: &mut rng };
    for _ in 0..MAX_DRAWS {
        if let Some(p) = draw_once(family, &mut draw) {
            if admissible(family, &p) {
                return Ok(p);
            }
        }
    }
    Err(FamilyError::Exhausted { family, draws: MAX_DRAWS })
}

/// Random rational parameters with numerators and denominators in
/// `1..=max` (random signs) and every `s_i` nonzero; generically rigid.
pub fn generic_sample(seed: u64, max: i64) -> LinkageParams<Surd> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut value = || {
        let n: i64 = rng.gen_range(1..=max);
        let d: i64 = rng.gen_range(1..=max);
        q(if rng.gen_bool(0.5) { n } else { -n }, d)
    };
    let d: [Surd; 6] = std::array::from_fn(|_| value());
    let s: [Surd; 6] = std::array::from_fn(|_| value());
    let w: [Surd; 6] = std::array::from_fn(|_| value());
    LinkageParams::from_dsw(d, s, w).expect("w is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadpoly::{far_bound, quad_minus, quad_plus};

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nonsense".parse::<Family>().is_err());
        assert_eq!("new_example".parse::<Builtin>().unwrap(), Builtin::NewExample);
    }

    #[test]
    fn bricard_builtin_data() {
        let p = builtin_instance(Builtin::BricardExample);
        assert_eq!(p.w(2), &q(2, 3));
        assert_eq!(p.s(6), &q(1, 1));
        assert!(membership(&p, Family::LineSymmetric, 0.0).member);
    }

    #[test]
    fn new_builtin_data() {
        let p = builtin_instance(Builtin::NewExample);
        assert_eq!(p.b(6), &q(1740, 1001));
        assert_eq!(p.b(5), &q(-2900, 1001));
        assert_eq!(p.b(2).clone() * p.c(1).clone(), q(305, 429));
        assert_eq!(families_of(&p, 0.0), vec![Family::NewFamily]);
    }

    #[test]
    fn samples_are_deterministic_members() {
        for family in Family::ALL {
            for seed in 0..5 {
                let p = sample(family, seed).unwrap();
                assert_eq!(p, sample(family, seed).unwrap());
                let m = membership(&p, family, 0.0);
                assert!(m.member, "{family} seed {seed}: {:?}", m.residuals);
            }
        }
    }

    #[test]
    fn orthogonal_shape() {
        let p = sample(Family::Orthogonal, 3).unwrap();
        assert!(p.c_all().iter().all(|c| c.is_zero()));
        assert!(p.s_all().iter().all(|s| s.is_zero()));
        let b2 = |i| p.b(i).square();
        assert_eq!(b2(6), b2(1) + b2(3) + b2(5) - b2(2) - b2(4));
        assert!(b2(6).signum() > 0);
    }

    #[test]
    fn new_family_sample_far_bounds() {
        let p = sample(Family::NewFamily, 11).unwrap();
        assert!(far_bound(&p, 1, 0.0).total() >= 2);
        assert_eq!(far_bound(&p, 2, 0.0).total(), 4);
        assert_eq!(far_bound(&p, 3, 0.0).total(), 4);
        assert_ne!(quad_minus(&p, 1), quad_minus(&p, 4));
        assert_eq!(quad_plus(&p, 1), quad_plus(&p, 4));
    }
}
