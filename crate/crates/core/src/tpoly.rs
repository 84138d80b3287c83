//! Polynomials in the half-angle cotangents `t_1 .. t_6`, used to check
//! traced curves against known equations.
//!
//! Syntax: a sum of monomials such as `171*t1^2*t2^2 - 134*t1 + 3/4`.
//! Coefficients are integers, decimals or fractions `p/q`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linkage::ConfigurationPoint;

/// The one-dimensional component of Bricard's example, as printed with the
/// worked instance.
pub const BRICARD_CURVE: [&str; 6] = [
    "171*t1^2*t2^2 - 134*t1^2*t2 + 40*t1*t2^2 + 49*t1^2 - 160*t1*t2 - 5*t2^2 - 24*t1 + 90*t2 - 255",
    "171*t1*t2^2 + 19*t2^2*t3 - 134*t1*t2 + 40*t2^2 - 222*t2*t3 + 49*t1 - 288*t2 + 105*t3",
    "171*t1*t2 - 133*t1*t3 + 19*t2*t3 - 134*t1 + 40*t2 - 222*t3 - 323",
    "t1 - t4",
    "t2 - t5",
    "t3 - t6",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse polynomial term {term:?}: {reason}")]
pub struct TPolyError {
    pub term: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    coeff: f64,
    exps: [u32; 6],
}

#[derive(Clone, Debug, PartialEq)]
pub struct TPoly {
    source: String,
    terms: Vec<Term>,
    /// Highest exponent of each variable.
    degrees: [u32; 6],
}

fn err(term: &str, reason: impl Into<String>) -> TPolyError {
    TPolyError { term: term.to_string(), reason: reason.into() }
}

fn parse_number(tok: &str, term: &str) -> Result<f64, TPolyError> {
    let value = match tok.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.parse().map_err(|_| err(term, format!("bad numerator {n:?}")))?;
            let d: f64 = d.parse().map_err(|_| err(term, format!("bad denominator {d:?}")))?;
            if d == 0.0 {
                return Err(err(term, "zero denominator"));
            }
            n / d
        }
        None => tok.parse().map_err(|_| err(term, format!("bad factor {tok:?}")))?,
    };
    Ok(value)
}

fn parse_term(sign: f64, body: &str) -> Result<Term, TPolyError> {
    let body = body.trim();
    if body.is_empty() {
        return Err(err(body, "empty term"));
    }
    let mut term = Term { coeff: sign, exps: [0; 6] };
    for factor in body.split('*').map(str::trim) {
        if let Some(var) = factor.strip_prefix('t') {
            let (idx, exp) = match var.split_once('^') {
                Some((i, e)) => (i, e.trim().parse::<u32>().map_err(|_| err(body, format!("bad exponent in {factor:?}")))?),
                None => (var, 1),
            };
            let idx: usize = idx.trim().parse().map_err(|_| err(body, format!("bad variable {factor:?}")))?;
            if !(1..=6).contains(&idx) {
                return Err(err(body, format!("variable index {idx} outside 1..=6")));
            }
            term.exps[idx - 1] += exp;
        } else {
            term.coeff *= parse_number(factor, body)?;
        }
    }
    Ok(term)
}

impl FromStr for TPoly {
    type Err = TPolyError;

    fn from_str(text: &str) -> Result<Self, TPolyError> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut current = String::new();
        let mut pending_op = false;
        let mut prev = ' ';
        for ch in text.chars() {
            // a sign right after an exponent marker belongs to a number
            if (ch == '+' || ch == '-') && !matches!(prev, 'e' | 'E') {
                if current.trim().is_empty() {
                    if pending_op || !terms.is_empty() {
                        return Err(err(text, "dangling operator"));
                    }
                } else {
                    terms.push(parse_term(sign, &current)?);
                    current.clear();
                }
                pending_op = true;
                sign = if ch == '-' { -1.0 } else { 1.0 };
            } else {
                current.push(ch);
                if !ch.is_whitespace() {
                    pending_op = false;
                }
            }
            if !ch.is_whitespace() {
                prev = ch;
            }
        }
        if current.trim().is_empty() {
            return Err(err(text, "expression ends with an operator"));
        }
        terms.push(parse_term(sign, &current)?);
        let mut degrees = [0; 6];
        for t in &terms {
            for k in 0..6 {
                degrees[k] = degrees[k].max(t.exps[k]);
            }
        }
        Ok(TPoly { source: text.trim().to_string(), terms, degrees })
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl TPoly {
    pub fn degrees(&self) -> [u32; 6] {
        self.degrees
    }

    /// Plain evaluation at finite `t`.
    pub fn eval_t(&self, t: &[f64; 6]) -> f64 {
        self.terms
            .iter()
            .map(|term| term.coeff * (0..6).map(|k| t[k].powi(term.exps[k] as i32)).product::<f64>())
            .sum()
    }

    /// Evaluation in the bounded angle chart: `P(t) * prod_k sin(theta_k/2)^d_k`
    /// with `d_k` the degree in `t_k`. Equals `P(t)` up to a factor of at
    /// most one and stays finite where some `t_k` is infinite.
    pub fn eval_angles(&self, cfg: &ConfigurationPoint) -> f64 {
        let (cos, sin): (Vec<f64>, Vec<f64>) = cfg.theta.iter().map(|th| ((th / 2.0).cos(), (th / 2.0).sin())).unzip();
        self.terms
            .iter()
            .map(|term| {
                term.coeff
                    * (0..6)
                        .map(|k| cos[k].powi(term.exps[k] as i32) * sin[k].powi((self.degrees[k] - term.exps[k]) as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

pub fn bricard_curve() -> Vec<TPoly> {
    BRICARD_CURVE.iter().map(|s| s.parse().expect("printed polynomials parse")).collect()
}
